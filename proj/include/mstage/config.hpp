#pragma once

#include <string>
#include <vector>

#include "mstage/serialize.hpp"

namespace mstage {

// Problem-calibrated defaults; every field is echoed back into reports.
ModelSpec default_model(Problem problem);
TwoStageConfig default_two_stage(Problem problem);

struct ExperimentConfig {
  std::string experiment = "rate";  // simulate|rate|allocate|dist-check|risk|limits|prop33|asymmetry
  ModelSpec model = default_model(Problem::ChangePoint);
  TwoStageConfig two_stage = default_two_stage(Problem::ChangePoint);
  std::vector<long> n_grid = {1 << 10, 1 << 11, 1 << 12, 1 << 13, 1 << 14, 1 << 15};
  std::vector<double> p_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  long reps = 500;
  std::uint64_t seed = 1;
  std::string out = "experiment";
  int jobs = 1;

  bool onestage_control = true;  // rate: also run the one-stage baseline
  bool use_mae = false;
  long oracle_draws = 2000;   // dist-check
  long draws = 10000;         // limits
  std::string drift = "abs";  // limits: abs|quad
  PathGrid grid;              // limits
  double h = 1.0;             // prop33
  double tau = 0.05;          // allocate
  long quantile_draws = 4000; // allocate
  double a1 = 2.0, a2 = 1.0;  // asymmetry
  DesignSpec oracle_design;   // risk one-stage arm

  void validate() const;  // throws config_error
};

// Parse over per-problem defaults; unknown keys rejected with their path.
ExperimentConfig config_from_json(const json& j);
json to_json(const ExperimentConfig& c);

}  // namespace mstage
