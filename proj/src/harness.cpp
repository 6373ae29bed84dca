#include "mstage/harness.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace mstage {

void parallel_for(int jobs, long count, const std::function<void(long)>& fn) {
  if (jobs <= 1 || count < 2) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(std::min<long>(jobs, count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const long chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const long lo = static_cast<long>(w) * chunk;
    const long hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (long i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

double target_two_stage_slope(const ModelSpec& model, const TwoStageConfig& cfg) {
  switch (cfg.problem) {
    case Problem::ChangePoint:
      return -(1.0 + cfg.gamma - 2.0 * model.xi);
    case Problem::InverseIsotonic:
    case Problem::Classification:
      return -(1.0 + cfg.gamma) / 3.0;
    case Problem::Mode:
      if (model.asym || model.curve.family == CurveFamily::ExpCusp)
        return -(1.0 + cfg.gamma) / 3.0;
      // smooth profile: deceleration under a uniform zoom, cube root under a
      // symmetric zoom
      return cfg.second_stage_design == StageTwoDesign::Uniform ? -(1.0 - cfg.gamma) / 3.0
                                                                : -1.0 / 3.0;
  }
  throw std::logic_error("unreachable");
}

double target_one_stage_slope(const ModelSpec& model) {
  return model.kind == ModelKind::ChangePoint ? -(1.0 - 2.0 * model.xi) : -1.0 / 3.0;
}

DriftSpec normalized_limit_law(Problem problem) {
  DriftSpec d;
  d.c = 1.0;
  d.diffusion = 1.0;
  if (problem == Problem::ChangePoint) {
    d.family = DriftFamily::AbsSlope;
    d.sign = ExtremumSign::Min;
  } else if (problem == Problem::Mode) {
    d.family = DriftFamily::Quadratic;
    d.sign = ExtremumSign::Max;
  } else {
    d.family = DriftFamily::Quadratic;
    d.sign = ExtremumSign::Min;
  }
  return d;
}

PathGrid default_oracle_grid(Problem problem) {
  (void)problem;
  // boundary hits measured at ~5e-5 for the abs-slope law on this grid,
  // far below the 0.1% truncation rule
  PathGrid g;
  g.step = 1e-3;
  g.range = 8.0;
  return g;
}

double limit_scale_constant(const ModelSpec& model, const TwoStageConfig& cfg, long n1, long n) {
  const double p_eff = static_cast<double>(n1) / static_cast<double>(n);
  switch (cfg.problem) {
    case Problem::ChangePoint: {
      std::optional<double> psi0;
      if (cfg.second_stage_design == StageTwoDesign::Symmetric) {
        DesignSpec d;
        d.kind = DesignKind::SymmetricZoom;
        d.density = cfg.density;
        d.density_rate = cfg.density_rate;
        psi0 = d.density_at0();
      }
      return changepoint_scale(cfg.K, model.sigma, model.c0, p_eff, cfg.gamma, psi0);
    }
    case Problem::InverseIsotonic: {
      const double d0 = true_threshold(model);
      return isotonic_scale(cfg.K, model.sigma, model.curve.deriv(d0), p_eff, cfg.gamma);
    }
    case Problem::Classification: {
      const double d0 = true_threshold(model);
      return classification_scale(cfg.K, model.curve.value(d0), model.curve.deriv(d0), p_eff,
                                  cfg.gamma);
    }
    case Problem::Mode: {
      const double m_d0 = eval_mean(model, model.d0, n);
      const double m_d0_b = eval_mean(model, model.d0 + cfg.b, n);
      const double m_prime_0 = model.asym ? -model.asym->second : model.curve.deriv(0.0);
      const double m_prime_b = model.asym ? -model.asym->second * std::exp(-model.asym->second * cfg.b)
                                          : model.curve.deriv(cfg.b);
      return mode_scales(cfg.K, cfg.b, m_d0, m_d0_b, m_prime_0, m_prime_b, model.sigma, p_eff,
                         cfg.gamma)
          .two_stage_constant;
    }
  }
  throw std::logic_error("unreachable");
}

SlopeSummary summarize_rates(const std::vector<long>& n_grid,
                             const std::vector<Eigen::ArrayXd>& errors_per_n, bool use_mae,
                             int jackknife_blocks) {
  if (n_grid.size() != errors_per_n.size())
    throw std::invalid_argument("summarize_rates: grid/errors mismatch");
  const auto summary_of = [use_mae](const Eigen::ArrayXd& e) {
    return use_mae ? e.abs().mean() : rmse(e);
  };
  SlopeSummary s;
  s.summary.reserve(n_grid.size());
  for (const auto& e : errors_per_n) s.summary.push_back(summary_of(e));
  const LogLogFit fit = fit_loglog(n_grid, s.summary);
  s.slope = fit.slope;
  s.se_ols = fit.se;

  // leave-one-block-out jackknife over replication blocks
  const long reps = errors_per_n.front().size();
  const int blocks = static_cast<int>(std::min<long>(jackknife_blocks, reps));
  std::vector<double> block_slopes;
  block_slopes.reserve(static_cast<std::size_t>(blocks));
  for (int b = 0; b < blocks; ++b) {
    const long lo = reps * b / blocks;
    const long hi = reps * (b + 1) / blocks;
    std::vector<double> y;
    y.reserve(n_grid.size());
    for (const auto& e : errors_per_n) {
      Eigen::ArrayXd rest(reps - (hi - lo));
      long k = 0;
      for (long r = 0; r < reps; ++r)
        if (r < lo || r >= hi) rest[k++] = e[r];
      y.push_back(summary_of(rest));
    }
    block_slopes.push_back(fit_loglog(n_grid, y).slope);
  }
  double mean_slope = 0.0;
  for (double v : block_slopes) mean_slope += v;
  mean_slope /= static_cast<double>(blocks);
  double ssq = 0.0;
  for (double v : block_slopes) ssq += (v - mean_slope) * (v - mean_slope);
  s.se_jackknife =
      std::sqrt(ssq * static_cast<double>(blocks - 1) / static_cast<double>(blocks));
  return s;
}

namespace {

struct ArmAccumulator {
  std::vector<Eigen::ArrayXd> errors;  // per n
  long clip = 0, vacuous = 0;
  std::vector<long> vacuous_per_n;
};

RateArm finish_arm(const std::vector<long>& n_grid, const ArmAccumulator& acc, long reps,
                   bool use_mae, double target) {
  const SlopeSummary s = summarize_rates(n_grid, acc.errors, use_mae);
  RateArm arm;
  arm.error_summary = s.summary;
  arm.slope = s.slope;
  arm.slope_se_ols = s.se_ols;
  arm.slope_se_jackknife = s.se_jackknife;
  arm.slope_se = std::max(s.se_ols, s.se_jackknife);
  arm.target_slope = target;
  arm.clip_count = acc.clip;
  arm.vacuous_count = acc.vacuous;
  arm.valid = true;
  for (long v : acc.vacuous_per_n)
    if (static_cast<double>(v) > 0.05 * static_cast<double>(reps)) arm.valid = false;
  return arm;
}

}  // namespace

RateReport rate_experiment(const ModelSpec& model, const TwoStageConfig& tpl,
                           const std::vector<long>& n_grid, long reps, std::uint64_t seed,
                           int jobs, bool with_one_stage_control, bool use_mae) {
  if (n_grid.size() < 4 || !std::is_sorted(n_grid.begin(), n_grid.end()) ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end())
    throw std::invalid_argument("rate_experiment: n_grid must be strictly increasing, length >= 4");
  if (reps < 100) throw std::invalid_argument("rate_experiment: reps must be >= 100");
  model.validate();
  {
    TwoStageConfig probe = tpl;
    probe.n = n_grid.front();
    probe.validate_gates(model);
  }
  const double d0 = true_threshold(model);

  RateReport report;
  report.n_grid = n_grid;
  report.reps = reps;
  report.use_mae = use_mae;

  ArmAccumulator two, one;
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    const long n = n_grid[gi];
    TwoStageConfig cfg = tpl;
    cfg.n = n;
    Eigen::ArrayXd err2(reps), err1(reps);
    std::vector<char> clip2(reps), vac2(reps);
    const std::string id2 = "rate:two:n=" + std::to_string(n);
    const std::string id1 = "rate:one:n=" + std::to_string(n);
    parallel_for(jobs, reps, [&](long r) {
      Rng rng = derive_stream(seed, id2, static_cast<std::uint64_t>(r));
      const EstimateRecord rec = run_two_stage(model, cfg, rng);
      err2[r] = rec.d2_hat - d0;
      clip2[static_cast<std::size_t>(r)] = rec.clip_flag ? 1 : 0;
      vac2[static_cast<std::size_t>(r)] = rec.vacuous_flag ? 1 : 0;
    });
    long vac_n = 0;
    for (long r = 0; r < reps; ++r) {
      two.clip += clip2[static_cast<std::size_t>(r)];
      vac_n += vac2[static_cast<std::size_t>(r)];
    }
    two.vacuous += vac_n;
    two.vacuous_per_n.push_back(vac_n);
    two.errors.push_back(err2);

    if (with_one_stage_control) {
      DesignSpec global;
      global.kind = DesignKind::UniformGlobal;
      parallel_for(jobs, reps, [&](long r) {
        Rng rng = derive_stream(seed, id1, static_cast<std::uint64_t>(r));
        const EstimateRecord rec = run_one_stage(model, n, global, rng, cfg.b);
        err1[r] = rec.d2_hat - d0;
      });
      one.errors.push_back(err1);
      one.vacuous_per_n.push_back(0);
    }
  }

  report.two_stage = finish_arm(n_grid, two, reps, use_mae, target_two_stage_slope(model, tpl));
  if (with_one_stage_control)
    report.one_stage = finish_arm(n_grid, one, reps, use_mae, target_one_stage_slope(model));
  return report;
}

namespace {

// Stage-one limit scale for the practical halfwidth rule, treated as free of
// p (the change-point gap is measured at the stage-one budget).
double stage_one_limit_scale(const ModelSpec& model, const TwoStageConfig& cfg) {
  switch (cfg.problem) {
    case Problem::ChangePoint:
      return 4.0 * model.sigma * model.sigma / (model.c0 * model.c0);
    case Problem::InverseIsotonic: {
      const double d0 = true_threshold(model);
      const double rp = model.curve.deriv(d0);
      return std::cbrt(4.0 * model.sigma * model.sigma / (rp * rp));
    }
    case Problem::Classification: {
      const double d0 = true_threshold(model);
      const double rp = model.curve.deriv(d0);
      const double v = model.curve.value(d0) * (1.0 - model.curve.value(d0));
      return std::cbrt(4.0 * v / (rp * rp));
    }
    case Problem::Mode: {
      const double m_b = eval_mean(model, model.d0 + cfg.b, cfg.n);
      const double m_prime_b = model.asym
                                   ? -model.asym->second * std::exp(-model.asym->second * cfg.b)
                                   : model.curve.deriv(cfg.b);
      const ModeScales s = mode_onestage_scales(m_b, m_prime_b, model.sigma);
      return std::pow(s.a / s.c, 2.0 / 3.0);
    }
  }
  throw std::logic_error("unreachable");
}

DriftSpec stage_one_limit_law(Problem problem) {
  DriftSpec d = normalized_limit_law(problem);
  if (problem == Problem::Mode) {
    d.family = DriftFamily::Quadratic;
    d.sign = ExtremumSign::Max;
  }
  return d;
}

}  // namespace

AllocationReport allocation_experiment(const ModelSpec& model, const TwoStageConfig& tpl,
                                       const std::vector<double>& p_grid, long n, long reps,
                                       double tau, long quantile_draws, std::uint64_t seed,
                                       int jobs) {
  if (p_grid.size() < 5) throw std::invalid_argument("allocation_experiment: p_grid length >= 5");
  for (double p : p_grid)
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("allocation_experiment: p_grid must lie in (0,1)");
  model.validate();
  const double d0 = true_threshold(model);

  AllocationReport rep;
  rep.p_grid = p_grid;
  rep.tau = tau;
  rep.n = n;
  rep.reps = reps;
  rep.optimal_p_theory = optimal_p(tpl.problem, tpl.problem == Problem::ChangePoint
                                                    ? std::optional<double>(model.xi)
                                                    : std::nullopt);

  // C_{tau/2} from a Monte Carlo sample of the stage-one limit law
  Rng qrng = derive_stream(seed, "allocate:quantile", 0);
  const Eigen::ArrayXd law =
      simulate_argext(stage_one_limit_law(tpl.problem), default_oracle_grid(tpl.problem),
                      quantile_draws, qrng);
  rep.halfwidth_constant =
      stage_one_limit_scale(model, tpl) * empirical_quantile(law, 1.0 - tau / 2.0);

  const double nu = tpl.problem == Problem::ChangePoint ? 1.0 - 2.0 * model.xi : 1.0 / 3.0;
  for (double p : p_grid) {
    TwoStageConfig cfg = tpl;
    cfg.n = n;
    cfg.p = p;
    const long n1 = std::lround(p * static_cast<double>(n));
    rep.n1.push_back(n1);
    const double H = rep.halfwidth_constant * std::pow(static_cast<double>(n1), -nu);
    Eigen::ArrayXd err(reps);
    std::vector<char> clip(reps), vac(reps);
    // one stream per replication, re-derived for every p: common random
    // numbers across the grid
    parallel_for(jobs, reps, [&](long r) {
      Rng rng = derive_stream(seed, "allocate", static_cast<std::uint64_t>(r));
      const EstimateRecord rec = run_two_stage(model, cfg, rng, H);
      err[r] = rec.d2_hat - d0;
      clip[static_cast<std::size_t>(r)] = rec.clip_flag ? 1 : 0;
      vac[static_cast<std::size_t>(r)] = rec.vacuous_flag ? 1 : 0;
    });
    for (long r = 0; r < reps; ++r) {
      rep.clip_count += clip[static_cast<std::size_t>(r)];
      rep.vacuous_count += vac[static_cast<std::size_t>(r)];
    }
    rep.variance.push_back(variance(err));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < rep.variance.size(); ++i)
    if (rep.variance[i] < rep.variance[best]) best = i;
  rep.argmin_p = p_grid[best];
  return rep;
}

DistCheckReport dist_check(const ModelSpec& model, const TwoStageConfig& cfg_in, long n,
                           long reps, long oracle_draws, std::uint64_t seed, int jobs) {
  if (reps < 1000 || oracle_draws < 1000)
    throw std::invalid_argument("dist_check: reps and oracle_draws must be >= 1000");
  model.validate();
  TwoStageConfig cfg = cfg_in;
  cfg.n = n;
  cfg.validate_gates(model);
  const double d0 = true_threshold(model);
  const long n1 = std::lround(cfg.p * static_cast<double>(n));

  DistCheckReport out;
  out.n = n;
  out.reps = reps;
  out.oracle_draws = oracle_draws;
  out.scale_used = limit_scale_constant(model, cfg, n1, n);
  if (!(out.scale_used > 0.0)) throw degenerate_error("degenerate limit");
  switch (cfg.problem) {
    case Problem::ChangePoint:
      out.rate_exponent = 1.0 + cfg.gamma - 2.0 * model.xi;
      break;
    default:
      out.rate_exponent = (1.0 + cfg.gamma) / 3.0;
      break;
  }

  Eigen::ArrayXd scaled(reps);
  const double n_rate = std::pow(static_cast<double>(n), out.rate_exponent);
  parallel_for(jobs, reps, [&](long r) {
    Rng rng = derive_stream(seed, "dist-check", static_cast<std::uint64_t>(r));
    const EstimateRecord rec = run_two_stage(model, cfg, rng);
    scaled[r] = n_rate * (rec.d2_hat - d0) / out.scale_used;
  });

  Rng orng = derive_stream(seed, "dist-check:oracle", 0);
  out.oracle_sample = simulate_argext(normalized_limit_law(cfg.problem),
                                      default_oracle_grid(cfg.problem), oracle_draws, orng);
  out.scaled_errors = scaled;
  out.ks_stat = ks_two_sample(scaled, out.oracle_sample);
  return out;
}

RiskReport excess_risk_experiment(const ModelSpec& model, const TwoStageConfig& tpl,
                                  const std::vector<long>& n_grid, long reps,
                                  const DesignSpec& oracle_design, std::uint64_t seed,
                                  int jobs) {
  if (model.kind != ModelKind::BinaryMonotone)
    throw std::invalid_argument("excess_risk_experiment: needs a BinaryMonotone model");
  model.validate();
  const double d0 = true_threshold(model);
  if (!(model.curve.deriv(d0) > 0.0))
    throw std::invalid_argument("excess_risk_experiment: curve must increase through 1/2");

  RiskReport rep;
  rep.n_grid = n_grid;
  rep.reps = reps;
  rep.two_target = -2.0 * (1.0 + tpl.gamma) / 3.0;
  rep.one_target = -2.0 / 3.0;

  std::vector<Eigen::ArrayXd> ex2_all, ex1_all;
  for (long n : n_grid) {
    TwoStageConfig cfg = tpl;
    cfg.n = n;
    Eigen::ArrayXd ex2(reps), ex1(reps);
    std::vector<char> vac(reps);
    const std::string id2 = "risk:two:n=" + std::to_string(n);
    const std::string id1 = "risk:one:n=" + std::to_string(n);
    parallel_for(jobs, reps, [&](long r) {
      Rng rng = derive_stream(seed, id2, static_cast<std::uint64_t>(r));
      const EstimateRecord rec = run_two_stage(model, cfg, rng);
      ex2[r] = excess_risk(model.curve, rec.d2_hat, d0);
      vac[static_cast<std::size_t>(r)] = rec.vacuous_flag ? 1 : 0;
    });
    parallel_for(jobs, reps, [&](long r) {
      Rng rng = derive_stream(seed, id1, static_cast<std::uint64_t>(r));
      const EstimateRecord rec = run_one_stage(model, n, oracle_design, rng);
      ex1[r] = excess_risk(model.curve, rec.d2_hat, d0);
    });
    for (long r = 0; r < reps; ++r) rep.vacuous_count += vac[static_cast<std::size_t>(r)];
    rep.two_stage_mean_excess.push_back(ex2.mean());
    rep.one_stage_mean_excess.push_back(ex1.mean());
    ex2_all.push_back(ex2);
    ex1_all.push_back(ex1);
  }

  const LogLogFit f2 = fit_loglog(n_grid, rep.two_stage_mean_excess);
  const LogLogFit f1 = fit_loglog(n_grid, rep.one_stage_mean_excess);
  rep.two_slope = f2.slope;
  rep.two_se = f2.se;
  rep.one_slope = f1.slope;
  rep.one_se = f1.se;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (rep.two_stage_mean_excess[i] < rep.one_stage_mean_excess[i]) {
      rep.crossover_n = n_grid[i];
      break;
    }
  }
  return rep;
}

Prop33Report prop33_experiment(double h, const std::vector<long>& n_grid, long reps,
                               const ModelSpec& cp_model, double p, double gamma, double K,
                               std::uint64_t seed, int jobs) {
  if (h == 0.0) {
    // T is identically zero; report zeros rather than dividing by |h|
    Prop33Report r;
    r.n_grid = n_grid;
    r.reps = reps;
    r.h = 0.0;
    r.pi0_sq = 0.0;
    r.var_T.assign(n_grid.size(), 0.0);
    r.skewness.assign(n_grid.size(), 0.0);
    return r;
  }
  if (cp_model.kind != ModelKind::ChangePoint)
    throw std::invalid_argument("prop33_experiment: needs a ChangePoint model");
  cp_model.validate();

  Prop33Report rep;
  rep.n_grid = n_grid;
  rep.reps = reps;
  rep.h = h;
  rep.pi0_sq = cp_model.sigma * cp_model.sigma * std::pow(p, gamma) *
               std::pow(1.0 - p, 1.0 - 2.0 * cp_model.xi) * std::abs(h) / K;

  const double eta = 1.0 + gamma - 2.0 * cp_model.xi;
  for (long n : n_grid) {
    const long n1 = std::lround(p * static_cast<double>(n));
    const long n2 = n - n1;
    const double Hn = K * std::pow(static_cast<double>(n1), -gamma);
    const double delta = h * std::pow(static_cast<double>(n), -eta);
    const double gap = cp_model.c0 * std::pow(static_cast<double>(n), -cp_model.xi);
    const double mid = cp_model.alpha_base + 0.5 * gap;
    const double d0 = cp_model.d0;
    Eigen::ArrayXd T(reps);
    const std::string id = "prop33:n=" + std::to_string(n);

    DesignSpec global;
    global.kind = DesignKind::UniformGlobal;
    parallel_for(jobs, reps, [&](long r) {
      Rng rng = derive_stream(seed, id, static_cast<std::uint64_t>(r));
      const SampleBatch b1 = sample_batch(cp_model, global, n1, n, rng);
      const double d1 = fit_changepoint_joint(b1).d_hat;
      double z_hat = 0.0, z_0 = 0.0;
      for (long i = 0; i < n2; ++i) {
        const double u = rng.uniform(-1.0, 1.0);
        const double eps = cp_model.sigma * rng.normal();
        for (int which = 0; which < 2; ++which) {
          const double mu = which == 0 ? d1 : d0;
          const double x = mu + u * Hn;
          const double ind =
              (x <= d0 + delta ? 1.0 : 0.0) - (x <= d0 ? 1.0 : 0.0);
          if (ind != 0.0) {
            const double y = eval_mean(cp_model, x, n) + eps;
            (which == 0 ? z_hat : z_0) += (y - mid) * ind;
          }
        }
      }
      const double scale = std::pow(static_cast<double>(n2), -cp_model.xi);
      T[r] = scale * (z_hat - z_0);
    });
    rep.var_T.push_back(variance(T));
    rep.skewness.push_back(sample_skewness(T));
  }
  return rep;
}

AsymmetryReport asymmetry_bias_experiment(double a1, double a2, double bin, double d0,
                                          double sigma, const std::vector<long>& n_grid,
                                          long reps, std::uint64_t seed, int jobs) {
  if (!(a1 > 0.0 && a2 > 0.0)) throw std::invalid_argument("asymmetry: rates must be > 0");
  if (!(d0 - bin > 0.0 && d0 + bin < 1.0))
    throw std::invalid_argument("asymmetry: [d0-b, d0+b] must lie inside (0,1)");

  ModelSpec model;
  model.kind = ModelKind::Unimodal;
  model.d0 = d0;
  model.sigma = sigma;
  model.curve.family = CurveFamily::ExpCusp;
  model.asym = std::make_pair(a1, a2);

  AsymmetryReport rep;
  rep.n_grid = n_grid;
  rep.reps = reps;
  rep.a1 = a1;
  rep.a2 = a2;
  rep.bin = bin;
  rep.d0 = d0;
  rep.d_star = d0 + (a1 - a2) * bin / (a1 + a2);

  DesignSpec global;
  global.kind = DesignKind::UniformGlobal;
  for (long n : n_grid) {
    Eigen::ArrayXd d1(reps);
    const std::string id = "asymmetry:n=" + std::to_string(n);
    parallel_for(jobs, reps, [&](long r) {
      Rng rng = derive_stream(seed, id, static_cast<std::uint64_t>(r));
      d1[r] = run_one_stage(model, n, global, rng, bin).d1_hat;
    });
    rep.mean_d1.push_back(d1.mean());
  }
  return rep;
}

}  // namespace mstage
