// Batch experiment front end: runs one experiment per invocation, writes
// <out>.report.json and <out>.data.csv, prints a one-line summary.
//
// Exit codes: 0 success, 1 usage/config error, 2 experiment-level error
// (gate violation, degenerate limit, truncation overflow).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "mstage/config.hpp"
#include "mstage/report.hpp"
#include "mstage/version.hpp"

namespace {

using namespace mstage;

// Flat flags mirror JSON paths one-to-one (e.g. --xi <-> $.model.xi); values
// given on the command line override the config file.
struct Flags {
  std::optional<std::string> config_path;
  std::optional<std::string> problem;
  std::optional<long> n;
  std::optional<double> p, gamma, K, b;
  std::optional<double> d0, sigma, alpha_base, c0, xi, t0;
  std::optional<std::string> curve;
  std::optional<std::string> second_stage_design, design_density;
  std::optional<std::string> noise;
  std::optional<long> reps, oracle_draws, draws, quantile_draws;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
  std::optional<std::string> drift;
  std::optional<double> step, range;
  std::optional<double> h, tau, a1, a2;
  std::optional<bool> no_control, mae;
  std::vector<long> n_grid;
  std::vector<double> p_grid;
};

void add_common_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON experiment config ($)");
  sub->add_option("--problem", f.problem,
                  "changepoint|inverse_isotonic|classification|mode ($.two_stage.problem)");
  sub->add_option("--n", f.n, "total budget ($.two_stage.n)");
  sub->add_option("--p", f.p, "stage-one fraction ($.two_stage.p)");
  sub->add_option("--gamma", f.gamma, "zoom exponent ($.two_stage.gamma)");
  sub->add_option("--K", f.K, "halfwidth scale ($.two_stage.K)");
  sub->add_option("--b", f.b, "mode bin width ($.two_stage.b)");
  sub->add_option("--second-stage-design", f.second_stage_design,
                  "uniform|symmetric ($.two_stage.second_stage_design.type)");
  sub->add_option("--design-density", f.design_density,
                  "triangular|trunc_exp ($.two_stage.second_stage_design.density)");
  sub->add_option("--d0", f.d0, "true threshold ($.model.d0)");
  sub->add_option("--sigma", f.sigma, "noise level ($.model.sigma)");
  sub->add_option("--alpha-base", f.alpha_base, "left level ($.model.alpha_base)");
  sub->add_option("--c0", f.c0, "signal amplitude ($.model.c0)");
  sub->add_option("--xi", f.xi, "signal decay exponent ($.model.xi)");
  sub->add_option("--t0", f.t0, "inverse target level ($.model.t0)");
  sub->add_option("--curve", f.curve, "linear|logistic|exp_cusp|quad_cap ($.model.curve.family)");
  sub->add_option("--noise", f.noise, "gaussian|uniform ($.model.noise)");
  sub->add_option("--reps", f.reps, "replications ($.reps)");
  sub->add_option("--seed", f.seed, "master seed ($.seed)");
  sub->add_option("--out", f.out, "output path prefix ($.out)");
  sub->add_option("--jobs", f.jobs, "worker threads; never affects results ($.jobs)");
  sub->add_option("--n-grid", f.n_grid, "budget grid ($.n_grid)")->delimiter(',');
  sub->add_option("--p-grid", f.p_grid, "allocation grid ($.p_grid)")->delimiter(',');
  sub->add_option("--oracle-draws", f.oracle_draws, "oracle sample size ($.oracle_draws)");
  sub->add_option("--draws", f.draws, "limit-law draws ($.draws)");
  sub->add_option("--quantile-draws", f.quantile_draws,
                  "draws behind the practical halfwidth quantile ($.quantile_draws)");
  sub->add_option("--drift", f.drift, "abs|quad ($.drift)");
  sub->add_option("--step", f.step, "grid step ($.grid.step)");
  sub->add_option("--range", f.range, "grid range ($.grid.range)");
  sub->add_option("--h", f.h, "local shift ($.h)");
  sub->add_option("--tau", f.tau, "halfwidth miss level ($.tau)");
  sub->add_option("--a1", f.a1, "left decay rate ($.a1)");
  sub->add_option("--a2", f.a2, "right decay rate ($.a2)");
  sub->add_flag("--no-control", f.no_control, "skip the one-stage control arm");
  sub->add_flag("--mae", f.mae, "summarize errors by MAE instead of RMSE");
}

ExperimentConfig build_config(const std::string& experiment, const Flags& f) {
  json j = json::object();
  if (f.config_path) {
    std::ifstream in(*f.config_path);
    if (!in) throw config_error("cannot open config file " + *f.config_path);
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw config_error(std::string("malformed JSON in config file: ") + e.what());
    }
  }
  // flags override file fields
  if (f.problem) j["two_stage"]["problem"] = *f.problem;
  if (f.n) j["two_stage"]["n"] = *f.n;
  if (f.p) j["two_stage"]["p"] = *f.p;
  if (f.gamma) j["two_stage"]["gamma"] = *f.gamma;
  if (f.K) j["two_stage"]["K"] = *f.K;
  if (f.b) j["two_stage"]["b"] = *f.b;
  if (f.seed) j["two_stage"]["seed"] = *f.seed;
  if (f.second_stage_design) j["two_stage"]["second_stage_design"]["type"] = *f.second_stage_design;
  if (f.design_density) j["two_stage"]["second_stage_design"]["density"] = *f.design_density;
  if (f.d0) j["model"]["d0"] = *f.d0;
  if (f.sigma) j["model"]["sigma"] = *f.sigma;
  if (f.alpha_base) j["model"]["alpha_base"] = *f.alpha_base;
  if (f.c0) j["model"]["c0"] = *f.c0;
  if (f.xi) j["model"]["xi"] = *f.xi;
  if (f.t0) j["model"]["t0"] = *f.t0;
  if (f.curve) j["model"]["curve"]["family"] = *f.curve;
  if (f.noise) j["model"]["noise"] = *f.noise;
  if (f.reps) j["reps"] = *f.reps;
  if (f.seed) j["seed"] = *f.seed;
  if (f.out) j["out"] = *f.out;
  if (f.jobs) j["jobs"] = *f.jobs;
  if (!f.n_grid.empty()) j["n_grid"] = f.n_grid;
  if (!f.p_grid.empty()) j["p_grid"] = f.p_grid;
  if (f.oracle_draws) j["oracle_draws"] = *f.oracle_draws;
  if (f.draws) j["draws"] = *f.draws;
  if (f.quantile_draws) j["quantile_draws"] = *f.quantile_draws;
  if (f.drift) j["drift"] = *f.drift;
  if (f.step) j["grid"]["step"] = *f.step;
  if (f.range) j["grid"]["range"] = *f.range;
  if (f.h) j["h"] = *f.h;
  if (f.tau) j["tau"] = *f.tau;
  if (f.a1) j["a1"] = *f.a1;
  if (f.a2) j["a2"] = *f.a2;
  if (f.no_control && *f.no_control) j["onestage_control"] = false;
  if (f.mae && *f.mae) j["use_mae"] = true;
  j["experiment"] = experiment;
  ExperimentConfig cfg = config_from_json(j);
  // the model kind always tracks the problem
  cfg.model.kind = model_kind_for(cfg.two_stage.problem);
  return cfg;
}

int run_experiment(const ExperimentConfig& cfg) {
  EmittedReport out;
  if (cfg.experiment == "simulate") {
    std::vector<EstimateRecord> recs(static_cast<std::size_t>(cfg.reps));
    parallel_for(cfg.jobs, cfg.reps, [&](long r) {
      Rng rng = derive_stream(cfg.seed, "simulate", static_cast<std::uint64_t>(r));
      recs[static_cast<std::size_t>(r)] = run_two_stage(cfg.model, cfg.two_stage, rng);
    });
    out = emit_simulate(cfg, recs);
  } else if (cfg.experiment == "rate") {
    out = emit_rate(cfg, rate_experiment(cfg.model, cfg.two_stage, cfg.n_grid, cfg.reps, cfg.seed,
                                         cfg.jobs, cfg.onestage_control, cfg.use_mae));
  } else if (cfg.experiment == "allocate") {
    out = emit_allocation(cfg, allocation_experiment(cfg.model, cfg.two_stage, cfg.p_grid,
                                                     cfg.two_stage.n, cfg.reps, cfg.tau,
                                                     cfg.quantile_draws, cfg.seed, cfg.jobs));
  } else if (cfg.experiment == "dist-check") {
    out = emit_dist_check(cfg, dist_check(cfg.model, cfg.two_stage, cfg.two_stage.n, cfg.reps,
                                          cfg.oracle_draws, cfg.seed, cfg.jobs));
  } else if (cfg.experiment == "risk") {
    out = emit_risk(cfg, excess_risk_experiment(cfg.model, cfg.two_stage, cfg.n_grid, cfg.reps,
                                                cfg.oracle_design, cfg.seed, cfg.jobs));
  } else if (cfg.experiment == "limits") {
    DriftSpec drift;
    drift.family = cfg.drift == "abs" ? DriftFamily::AbsSlope : DriftFamily::Quadratic;
    drift.sign = ExtremumSign::Min;
    Rng rng = derive_stream(cfg.seed, "limits:" + cfg.drift, 0);
    long hits = 0;
    const Eigen::ArrayXd samples = simulate_argext(drift, cfg.grid, cfg.draws, rng, &hits);
    out = emit_limits(cfg, drift, samples, hits);
  } else if (cfg.experiment == "prop33") {
    out = emit_prop33(cfg, prop33_experiment(cfg.h, cfg.n_grid, cfg.reps, cfg.model,
                                             cfg.two_stage.p, cfg.two_stage.gamma, cfg.two_stage.K,
                                             cfg.seed, cfg.jobs));
  } else if (cfg.experiment == "asymmetry") {
    out = emit_asymmetry(cfg, asymmetry_bias_experiment(cfg.a1, cfg.a2, cfg.two_stage.b,
                                                        cfg.model.d0, cfg.model.sigma, cfg.n_grid,
                                                        cfg.reps, cfg.seed, cfg.jobs));
  } else {
    throw config_error("bad value at $.experiment: " + cfg.experiment);
  }
  std::cout << out.summary_line << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(mstage::kVersion) +
               " - two-stage adaptive sampling experiments and limit-law simulators"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  const std::vector<std::string> names = {"simulate", "rate",   "allocate", "dist-check",
                                          "risk",     "limits", "prop33",   "asymmetry"};
  const std::vector<std::string> descs = {
      "replicated two-stage runs, one record per replication",
      "error-vs-budget slopes against the theoretical rate",
      "budget-allocation sweep over the stage-one fraction p",
      "two-sample KS check of scaled errors against the limit law",
      "excess misclassification risk, two-stage vs oracle one-stage",
      "draws of a Brownian argmin/argmax limit law",
      "variance of the plug-in criterion difference statistic",
      "bias of the binned mode search under an asymmetric signal"};
  std::vector<Flags> flags(names.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descs[i]);
    sub->set_help_flag("--help", "print help");
    add_common_flags(sub, flags[i]);
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      const mstage::ExperimentConfig cfg = build_config(names[i], flags[i]);
      return run_experiment(cfg);
    } catch (const mstage::config_error& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 1;
    } catch (const mstage::gate_error& e) {
      std::cerr << "experiment error: " << e.what() << "\n";
      return 2;
    } catch (const mstage::degenerate_error& e) {
      std::cerr << "experiment error: " << e.what() << "\n";
      return 2;
    } catch (const std::invalid_argument& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  return 1;
}
