#include "mstage/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mstage/version.hpp"

namespace mstage {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

json base_report(const ExperimentConfig& cfg) {
  json j;
  j["version"] = kVersion;
  j["config"] = to_json(cfg);
  return j;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

void write_report_json(const ExperimentConfig& cfg, json j) {
  write_file(cfg.out + ".report.json", j.dump(2) + "\n");
}

struct Csv {
  std::ostringstream os;
  explicit Csv(const std::string& header) { os << header << "\n"; }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ",";
      os << cells[i];
    }
    os << "\n";
  }
  void save(const ExperimentConfig& cfg) { write_file(cfg.out + ".data.csv", os.str()); }
};

std::string pass_str(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

EmittedReport emit_simulate(const ExperimentConfig& cfg, const std::vector<EstimateRecord>& recs) {
  const double d0 = true_threshold(cfg.model);
  Csv csv("rep,d1_hat,d2_hat,n1,n2,clip,vacuous,wall_ms");
  Eigen::ArrayXd err(static_cast<Eigen::Index>(recs.size()));
  long clip = 0, vac = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    csv.row({std::to_string(i), fmt_double(r.d1_hat), fmt_double(r.d2_hat), std::to_string(r.n1),
             std::to_string(r.n2), std::to_string(r.clip_flag ? 1 : 0),
             std::to_string(r.vacuous_flag ? 1 : 0), fmt_double(r.wall_ms)});
    err[static_cast<Eigen::Index>(i)] = r.d2_hat - d0;
    clip += r.clip_flag;
    vac += r.vacuous_flag;
  }
  csv.save(cfg);

  json j = base_report(cfg);
  j["results"]["rmse_d2"] = rmse(err);
  j["results"]["mean_d2"] = err.mean() + d0;
  j["results"]["clip_count"] = clip;
  j["results"]["vacuous_count"] = vac;
  write_report_json(cfg, j);

  std::ostringstream s;
  s << "simulate " << problem_name(cfg.two_stage.problem) << ": reps=" << recs.size()
    << " rmse(d2-d0)=" << rmse(err) << " clip=" << clip << " vacuous=" << vac;
  return {s.str()};
}

namespace {

json arm_json(const RateArm& a) {
  json j;
  j["error_summary"] = a.error_summary;
  j["slope"] = a.slope;
  j["slope_se"] = a.slope_se;
  j["slope_se_ols"] = a.slope_se_ols;
  j["slope_se_jackknife"] = a.slope_se_jackknife;
  j["target_slope"] = a.target_slope;
  j["clip_count"] = a.clip_count;
  j["vacuous_count"] = a.vacuous_count;
  j["valid"] = a.valid;
  return j;
}

}  // namespace

EmittedReport emit_rate(const ExperimentConfig& cfg, const RateReport& r) {
  Csv csv("n,arm,error_summary");
  for (std::size_t i = 0; i < r.n_grid.size(); ++i) {
    csv.row({std::to_string(r.n_grid[i]), "two_stage", fmt_double(r.two_stage.error_summary[i])});
    if (r.one_stage)
      csv.row({std::to_string(r.n_grid[i]), "one_stage", fmt_double(r.one_stage->error_summary[i])});
  }
  csv.save(cfg);

  json j = base_report(cfg);
  j["results"]["n_grid"] = r.n_grid;
  j["results"]["reps"] = r.reps;
  j["results"]["summary_kind"] = r.use_mae ? "mae" : "rmse";
  j["results"]["two_stage"] = arm_json(r.two_stage);
  if (r.one_stage) j["results"]["one_stage"] = arm_json(*r.one_stage);
  const double tol = 0.1;
  const bool ok = std::abs(r.two_stage.slope - r.two_stage.target_slope) <= tol &&
                  r.two_stage.valid &&
                  (!r.one_stage || std::abs(r.one_stage->slope - r.one_stage->target_slope) <= tol);
  j["summary"] = {{"statistic", r.two_stage.slope},
                  {"target", r.two_stage.target_slope},
                  {"tolerance", tol},
                  {"pass", ok}};
  write_report_json(cfg, j);

  std::ostringstream s;
  s << "rate " << problem_name(cfg.two_stage.problem) << ": slope=" << r.two_stage.slope
    << " (se " << r.two_stage.slope_se << ") target=" << r.two_stage.target_slope;
  if (r.one_stage)
    s << " | one-stage slope=" << r.one_stage->slope << " target=" << r.one_stage->target_slope;
  s << " -> " << pass_str(ok);
  return {s.str()};
}

EmittedReport emit_allocation(const ExperimentConfig& cfg, const AllocationReport& r) {
  Csv csv("p,n1,variance");
  for (std::size_t i = 0; i < r.p_grid.size(); ++i)
    csv.row({fmt_double(r.p_grid[i]), std::to_string(r.n1[i]), fmt_double(r.variance[i])});
  csv.save(cfg);

  json j = base_report(cfg);
  j["results"]["p_grid"] = r.p_grid;
  j["results"]["variance"] = r.variance;
  j["results"]["n1"] = r.n1;
  j["results"]["argmin_p"] = r.argmin_p;
  j["results"]["optimal_p_theory"] = r.optimal_p_theory;
  j["results"]["halfwidth_constant"] = r.halfwidth_constant;
  j["results"]["tau"] = r.tau;
  j["results"]["clip_count"] = r.clip_count;
  j["results"]["vacuous_count"] = r.vacuous_count;
  double spacing = 0.1;
  if (r.p_grid.size() > 1) {
    spacing = 0.0;
    for (std::size_t i = 1; i < r.p_grid.size(); ++i)
      spacing = std::max(spacing, r.p_grid[i] - r.p_grid[i - 1]);
  }
  const bool ok = std::abs(r.argmin_p - r.optimal_p_theory) <= spacing + 1e-12;
  j["summary"] = {{"statistic", r.argmin_p},
                  {"target", r.optimal_p_theory},
                  {"tolerance", spacing},
                  {"pass", ok}};
  write_report_json(cfg, j);

  std::ostringstream s;
  s << "allocate " << problem_name(cfg.two_stage.problem) << ": argmin p=" << r.argmin_p
    << " target=" << r.optimal_p_theory << " -> " << pass_str(ok);
  return {s.str()};
}

EmittedReport emit_dist_check(const ExperimentConfig& cfg, const DistCheckReport& r) {
  Csv csv("kind,value");
  for (Eigen::Index i = 0; i < r.scaled_errors.size(); ++i)
    csv.row({"scaled_error", fmt_double(r.scaled_errors[i])});
  for (Eigen::Index i = 0; i < r.oracle_sample.size(); ++i)
    csv.row({"oracle", fmt_double(r.oracle_sample[i])});
  csv.save(cfg);

  json j = base_report(cfg);
  j["results"]["n"] = r.n;
  j["results"]["reps"] = r.reps;
  j["results"]["ks_stat"] = r.ks_stat;
  j["results"]["scale_used"] = r.scale_used;
  j["results"]["rate_exponent"] = r.rate_exponent;
  j["results"]["oracle_draws"] = r.oracle_draws;
  const double tol = 0.08;
  const bool ok = r.ks_stat < tol;
  j["summary"] = {{"statistic", r.ks_stat}, {"target", 0.0}, {"tolerance", tol}, {"pass", ok}};
  write_report_json(cfg, j);

  std::ostringstream s;
  s << "dist-check " << problem_name(cfg.two_stage.problem) << ": ks=" << r.ks_stat
    << " (limit " << tol << ", scale " << r.scale_used << ") -> " << pass_str(ok);
  return {s.str()};
}

EmittedReport emit_risk(const ExperimentConfig& cfg, const RiskReport& r) {
  Csv csv("n,arm,mean_excess");
  for (std::size_t i = 0; i < r.n_grid.size(); ++i) {
    csv.row({std::to_string(r.n_grid[i]), "two_stage", fmt_double(r.two_stage_mean_excess[i])});
    csv.row({std::to_string(r.n_grid[i]), "one_stage", fmt_double(r.one_stage_mean_excess[i])});
  }
  csv.save(cfg);

  json j = base_report(cfg);
  j["results"]["n_grid"] = r.n_grid;
  j["results"]["reps"] = r.reps;
  j["results"]["two_stage_mean_excess"] = r.two_stage_mean_excess;
  j["results"]["one_stage_mean_excess"] = r.one_stage_mean_excess;
  j["results"]["two_slope"] = r.two_slope;
  j["results"]["two_se"] = r.two_se;
  j["results"]["two_target"] = r.two_target;
  j["results"]["one_slope"] = r.one_slope;
  j["results"]["one_se"] = r.one_se;
  j["results"]["one_target"] = r.one_target;
  if (r.crossover_n) j["results"]["crossover_n"] = *r.crossover_n;
  j["results"]["vacuous_count"] = r.vacuous_count;
  const double tol = 0.15;
  const bool ok = std::abs(r.two_slope - r.two_target) <= tol &&
                  std::abs(r.one_slope - r.one_target) <= tol &&
                  r.two_stage_mean_excess.back() < r.one_stage_mean_excess.back();
  j["summary"] = {{"statistic", r.two_slope}, {"target", r.two_target}, {"tolerance", tol},
                  {"pass", ok}};
  write_report_json(cfg, j);

  std::ostringstream s;
  s << "risk: two-stage slope=" << r.two_slope << " target=" << r.two_target
    << " | one-stage slope=" << r.one_slope << " target=" << r.one_target << " | beats at n="
    << r.n_grid.back() << ": "
    << (r.two_stage_mean_excess.back() < r.one_stage_mean_excess.back() ? "yes" : "no") << " -> "
    << pass_str(ok);
  return {s.str()};
}

EmittedReport emit_limits(const ExperimentConfig& cfg, const DriftSpec& drift,
                          const Eigen::ArrayXd& samples, long boundary_hits) {
  Csv csv("sample");
  for (Eigen::Index i = 0; i < samples.size(); ++i) csv.row({fmt_double(samples[i])});
  csv.save(cfg);

  json j = base_report(cfg);
  j["results"]["drift"] = {{"family", drift.family == DriftFamily::AbsSlope ? "abs" : "quad"},
                           {"c", drift.c},
                           {"sign", drift.sign == ExtremumSign::Min ? "min" : "max"},
                           {"diffusion", drift.diffusion}};
  j["results"]["grid"] = {{"step", cfg.grid.step}, {"range", cfg.grid.range}};
  j["results"]["seed"] = cfg.seed;
  j["results"]["draws"] = samples.size();
  j["results"]["boundary_hits"] = boundary_hits;
  write_report_json(cfg, j);

  std::ostringstream s;
  s << "limits " << cfg.drift << ": draws=" << samples.size() << " sd=" << std::sqrt(variance(samples))
    << " boundary_hits=" << boundary_hits;
  return {s.str()};
}

EmittedReport emit_prop33(const ExperimentConfig& cfg, const Prop33Report& r) {
  Csv csv("n,var_T,pi0_sq,skewness");
  for (std::size_t i = 0; i < r.n_grid.size(); ++i)
    csv.row({std::to_string(r.n_grid[i]), fmt_double(r.var_T[i]), fmt_double(r.pi0_sq),
             fmt_double(r.skewness[i])});
  csv.save(cfg);

  json j = base_report(cfg);
  j["results"]["n_grid"] = r.n_grid;
  j["results"]["reps"] = r.reps;
  j["results"]["h"] = r.h;
  j["results"]["pi0_sq"] = r.pi0_sq;
  j["results"]["var_T"] = r.var_T;
  j["results"]["skewness"] = r.skewness;
  const double rel = r.pi0_sq > 0.0 ? std::abs(r.var_T.back() / r.pi0_sq - 1.0) : 0.0;
  const bool ok = rel <= 0.10;
  j["summary"] = {{"statistic", r.var_T.back()}, {"target", r.pi0_sq}, {"tolerance", 0.10},
                  {"pass", ok}};
  write_report_json(cfg, j);

  std::ostringstream s;
  s << "prop33: var(T)=" << r.var_T.back() << " target pi0^2=" << r.pi0_sq << " (rel err " << rel
    << ") -> " << pass_str(ok);
  return {s.str()};
}

EmittedReport emit_asymmetry(const ExperimentConfig& cfg, const AsymmetryReport& r) {
  Csv csv("n,mean_d1,d_star");
  for (std::size_t i = 0; i < r.n_grid.size(); ++i)
    csv.row({std::to_string(r.n_grid[i]), fmt_double(r.mean_d1[i]), fmt_double(r.d_star)});
  csv.save(cfg);

  json j = base_report(cfg);
  j["results"]["n_grid"] = r.n_grid;
  j["results"]["reps"] = r.reps;
  j["results"]["a1"] = r.a1;
  j["results"]["a2"] = r.a2;
  j["results"]["bin"] = r.bin;
  j["results"]["d0"] = r.d0;
  j["results"]["d_star"] = r.d_star;
  j["results"]["mean_d1"] = r.mean_d1;
  const double err = std::abs(r.mean_d1.back() - r.d_star);
  const bool ok = err < 0.01;
  j["summary"] = {{"statistic", r.mean_d1.back()}, {"target", r.d_star}, {"tolerance", 0.01},
                  {"pass", ok}};
  write_report_json(cfg, j);

  std::ostringstream s;
  s << "asymmetry: mean d1=" << r.mean_d1.back() << " target d*=" << r.d_star << " (|err| "
    << err << ") -> " << pass_str(ok);
  return {s.str()};
}

}  // namespace mstage
