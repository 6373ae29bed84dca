#pragma once

#include <cstdint>
#include <optional>

#include "mstage/estimators.hpp"
#include "mstage/limit_laws.hpp"
#include "mstage/model.hpp"

namespace mstage {

enum class StageTwoDesign { Uniform, Symmetric };

struct TwoStageConfig {
  Problem problem = Problem::ChangePoint;
  long n = 1 << 12;
  double p = 0.25;       // stage-one fraction
  double gamma = 0.2;    // zoom exponent
  double K = 1.0;        // halfwidth scale
  double b = 0.1;        // mode bin width (stage one); stage two uses b*n1^{-gamma}
  std::uint64_t seed = 1;
  StageTwoDesign second_stage_design = StageTwoDesign::Uniform;
  DensityKind density = DensityKind::Triangular;
  double density_rate = 1.0;

  // Validity gates: changepoint needs gamma < 1-2*xi, the cube-root problems
  // need gamma < 1/3, mode additionally K > b. Throws gate_error.
  void validate_gates(const ModelSpec& model) const;
};

struct EstimateRecord {
  double d1_hat = 0.0;
  double d2_hat = 0.0;
  std::optional<double> alpha_hat, beta_hat;
  long n1 = 0, n2 = 0;
  Interval window;
  bool clip_flag = false;
  bool vacuous_flag = false;
  double wall_ms = 0.0;
};

// Stage one on Uniform[0,1], zoomed stage two centered at the stage-one
// estimate. halfwidth_override replaces K*n1^{-gamma} (used by the
// allocation experiment's practical halfwidth rule) and bypasses the gamma
// gate; the mode bin keeps the ratio b/K of the override.
EstimateRecord run_two_stage(const ModelSpec& model, const TwoStageConfig& cfg, Rng& rng,
                             std::optional<double> halfwidth_override = {});

// Stage-one estimator on all n points from the given design; d2_hat = d1_hat.
EstimateRecord run_one_stage(const ModelSpec& model, long n, const DesignSpec& design, Rng& rng,
                             double shorth_bin = 0.1);

// limit_quantile / n1^rate with rate = 1-2*xi (changepoint) or 1/3.
double practical_halfwidth(Problem problem, long n1, double tau, double limit_quantile,
                           double xi = 0.0);

// d0 as targeted by the problem's estimator (curve.inverse(t0) for the
// monotone problems, model.d0 otherwise).
double true_threshold(const ModelSpec& model);

// problem <-> model kind consistency
ModelKind model_kind_for(Problem problem);

}  // namespace mstage
