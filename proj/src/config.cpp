#include "mstage/config.hpp"

#include <algorithm>
#include <set>

namespace mstage {

ModelSpec default_model(Problem problem) {
  ModelSpec m;
  switch (problem) {
    case Problem::ChangePoint:
      m.kind = ModelKind::ChangePoint;
      m.d0 = 0.5;
      m.sigma = 0.15;
      m.alpha_base = 0.0;
      m.c0 = 1.0;
      m.xi = 0.25;
      break;
    case Problem::InverseIsotonic:
      m.kind = ModelKind::Monotone;
      m.d0 = 0.5;
      m.sigma = 0.1;
      m.curve.family = CurveFamily::Linear;
      m.curve.slope = 1.0;
      m.curve.intercept = 0.0;
      m.t0 = 0.5;
      break;
    case Problem::Classification:
      m.kind = ModelKind::BinaryMonotone;
      m.d0 = 0.5;
      m.curve.family = CurveFamily::Logistic;
      m.curve.steepness = 4.0;
      m.curve.center = 0.5;
      m.t0 = 0.5;
      break;
    case Problem::Mode:
      m.kind = ModelKind::Unimodal;
      m.d0 = 0.5;
      m.sigma = 0.25;
      m.curve.family = CurveFamily::ExpCusp;
      m.curve.rate = 1.0;
      break;
  }
  return m;
}

TwoStageConfig default_two_stage(Problem problem) {
  TwoStageConfig c;
  c.problem = problem;
  c.n = 1 << 14;
  c.K = 1.0;
  c.b = 0.1;
  switch (problem) {
    case Problem::ChangePoint:
      c.p = 1.0 / 3.0;
      c.gamma = 0.3;
      break;
    case Problem::InverseIsotonic:
      c.p = 0.25;
      c.gamma = 0.2;
      break;
    case Problem::Classification:
      c.p = 0.25;
      c.gamma = 0.3;
      break;
    case Problem::Mode:
      c.p = 0.25;
      c.gamma = 0.2;
      break;
  }
  return c;
}

namespace {

DesignSpec default_oracle_design(const ModelSpec& model) {
  DesignSpec d;
  d.kind = DesignKind::SymmetricZoom;
  d.density = DensityKind::Triangular;
  d.center = model.kind == ModelKind::BinaryMonotone || model.kind == ModelKind::Monotone
                 ? true_threshold(model)
                 : model.d0;
  d.halfwidth = 0.5;
  return d;
}

const std::set<std::string> kExperiments = {"simulate", "rate",   "allocate", "dist-check",
                                            "risk",     "limits", "prop33",   "asymmetry"};

}  // namespace

void ExperimentConfig::validate() const {
  if (!kExperiments.count(experiment))
    throw config_error("bad value at $.experiment: " + experiment);
  if (reps < 1) throw config_error("bad value at $.reps: must be >= 1");
  if (jobs < 1) throw config_error("bad value at $.jobs: must be >= 1");
  if (draws < 1) throw config_error("bad value at $.draws: must be >= 1");
  if (!(tau > 0.0 && tau < 1.0)) throw config_error("bad value at $.tau: must lie in (0,1)");
  if (drift != "abs" && drift != "quad") throw config_error("bad value at $.drift: abs or quad");
  if (n_grid.empty() || !std::is_sorted(n_grid.begin(), n_grid.end()))
    throw config_error("bad value at $.n_grid: must be increasing and nonempty");
  for (double p : p_grid)
    if (!(p > 0.0 && p < 1.0)) throw config_error("bad value at $.p_grid: entries in (0,1)");
}

ExperimentConfig config_from_json(const json& j) {
  require_known_keys(j,
                     {"experiment", "model", "two_stage", "n_grid", "p_grid", "reps", "seed",
                      "out", "jobs", "onestage_control", "use_mae", "oracle_draws", "draws",
                      "drift", "grid", "h", "tau", "quantile_draws", "a1", "a2", "oracle_design"},
                     "$");
  ExperimentConfig c;
  // problem first so model/two_stage defaults match it
  Problem problem = Problem::ChangePoint;
  if (j.contains("two_stage") && j.at("two_stage").contains("problem"))
    problem = problem_from_name(j.at("two_stage").at("problem").get<std::string>(),
                                "$.two_stage.problem");
  c.model = default_model(problem);
  c.two_stage = default_two_stage(problem);

  if (j.contains("experiment")) {
    try {
      c.experiment = j.at("experiment").get<std::string>();
    } catch (const json::exception&) {
      throw config_error("bad value at $.experiment");
    }
  }
  if (j.contains("model")) c.model = model_from_json(j.at("model"), "$.model", c.model);
  if (j.contains("two_stage"))
    c.two_stage = two_stage_from_json(j.at("two_stage"), "$.two_stage", c.two_stage);
  if (j.contains("n_grid")) {
    try {
      c.n_grid = j.at("n_grid").get<std::vector<long>>();
    } catch (const json::exception&) {
      throw config_error("bad value at $.n_grid");
    }
  }
  if (j.contains("p_grid")) {
    try {
      c.p_grid = j.at("p_grid").get<std::vector<double>>();
    } catch (const json::exception&) {
      throw config_error("bad value at $.p_grid");
    }
  }
  const auto get_num = [&](const char* key, auto fallback) {
    using T = decltype(fallback);
    if (!j.contains(key)) return fallback;
    try {
      return j.at(key).get<T>();
    } catch (const json::exception&) {
      throw config_error(std::string("bad value at $.") + key);
    }
  };
  c.reps = get_num("reps", c.reps);
  c.seed = get_num("seed", c.seed);
  c.jobs = get_num("jobs", c.jobs);
  c.onestage_control = get_num("onestage_control", c.onestage_control);
  c.use_mae = get_num("use_mae", c.use_mae);
  c.oracle_draws = get_num("oracle_draws", c.oracle_draws);
  c.draws = get_num("draws", c.draws);
  c.h = get_num("h", c.h);
  c.tau = get_num("tau", c.tau);
  c.quantile_draws = get_num("quantile_draws", c.quantile_draws);
  c.a1 = get_num("a1", c.a1);
  c.a2 = get_num("a2", c.a2);
  if (j.contains("out")) {
    try {
      c.out = j.at("out").get<std::string>();
    } catch (const json::exception&) {
      throw config_error("bad value at $.out");
    }
  }
  if (j.contains("drift")) {
    try {
      c.drift = j.at("drift").get<std::string>();
    } catch (const json::exception&) {
      throw config_error("bad value at $.drift");
    }
  }
  if (j.contains("grid")) {
    require_known_keys(j.at("grid"), {"step", "range"}, "$.grid");
    c.grid.step = j.at("grid").value("step", c.grid.step);
    c.grid.range = j.at("grid").value("range", c.grid.range);
  }
  c.oracle_design = default_oracle_design(c.model);
  if (j.contains("oracle_design"))
    c.oracle_design = design_from_json(j.at("oracle_design"), "$.oracle_design", c.oracle_design);
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["model"] = to_json(c.model);
  j["two_stage"] = to_json(c.two_stage);
  j["n_grid"] = c.n_grid;
  j["p_grid"] = c.p_grid;
  j["reps"] = c.reps;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["jobs"] = c.jobs;
  j["onestage_control"] = c.onestage_control;
  j["use_mae"] = c.use_mae;
  j["oracle_draws"] = c.oracle_draws;
  j["draws"] = c.draws;
  j["drift"] = c.drift;
  j["grid"] = json{{"step", c.grid.step}, {"range", c.grid.range}};
  j["h"] = c.h;
  j["tau"] = c.tau;
  j["quantile_draws"] = c.quantile_draws;
  j["a1"] = c.a1;
  j["a2"] = c.a2;
  j["oracle_design"] = to_json(c.oracle_design);
  return j;
}

}  // namespace mstage
