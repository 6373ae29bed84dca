#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mstage/stats.hpp"
#include "mstage/two_stage.hpp"

namespace mstage {

// Static partition of [0, count) over worker threads. Results must be
// written into per-index slots; aggregation order never depends on jobs.
void parallel_for(int jobs, long count, const std::function<void(long)>& fn);

struct RateArm {
  std::vector<double> error_summary;  // RMSE (or MAE) of d2-d0 per n
  double slope = 0.0;
  double slope_se = 0.0;  // max(OLS se, seed-block jackknife se)
  double slope_se_ols = 0.0;
  double slope_se_jackknife = 0.0;
  double target_slope = 0.0;
  long clip_count = 0;
  long vacuous_count = 0;
  bool valid = true;  // false when vacuous replications exceed 5% at any n
};

struct RateReport {
  std::vector<long> n_grid;
  long reps = 0;
  bool use_mae = false;
  RateArm two_stage;
  std::optional<RateArm> one_stage;
};

// Per-n replicated runs, error summary and fitted log-log slope.
RateReport rate_experiment(const ModelSpec& model, const TwoStageConfig& tpl,
                           const std::vector<long>& n_grid, long reps, std::uint64_t seed,
                           int jobs, bool with_one_stage_control, bool use_mae = false);

// Log-log slope + larger of OLS/jackknife standard errors from per-rep
// errors keyed (n, rep). Exposed so fabricated-error oracles can exercise
// the summary path directly.
struct SlopeSummary {
  std::vector<double> summary;
  double slope, se_ols, se_jackknife;
};
SlopeSummary summarize_rates(const std::vector<long>& n_grid,
                             const std::vector<Eigen::ArrayXd>& errors_per_n, bool use_mae,
                             int jackknife_blocks = 10);

struct AllocationReport {
  std::vector<double> p_grid;
  std::vector<double> variance;  // empirical variance of d2_hat per p
  std::vector<long> n1;
  double argmin_p = 0.0;
  double optimal_p_theory = 0.0;
  double halfwidth_constant = 0.0;  // C_{tau/2} of the practical rule
  double tau = 0.0;
  long n = 0;
  long reps = 0;
  long clip_count = 0;
  long vacuous_count = 0;
};

// Budget-allocation sweep under the practical halfwidth rule
// H(p) = C_{tau/2} * n1^{-nu}; common random numbers across the p grid.
AllocationReport allocation_experiment(const ModelSpec& model, const TwoStageConfig& tpl,
                                       const std::vector<double>& p_grid, long n, long reps,
                                       double tau, long quantile_draws, std::uint64_t seed,
                                       int jobs);

struct DistCheckReport {
  long n = 0;
  long reps = 0;
  double ks_stat = 0.0;
  double scale_used = 0.0;
  double rate_exponent = 0.0;
  long oracle_draws = 0;
  Eigen::ArrayXd scaled_errors;
  Eigen::ArrayXd oracle_sample;
};

// KS distance between n^rate * (d2-d0) / constant and the matching
// normalized Brownian extremum law. Constants use the realized n1/n.
DistCheckReport dist_check(const ModelSpec& model, const TwoStageConfig& cfg, long n, long reps,
                           long oracle_draws, std::uint64_t seed, int jobs);

// Normalized limit law of the problem's second-stage estimate, and a default
// grid wide enough to keep boundary hits under the 0.1% truncation rule.
DriftSpec normalized_limit_law(Problem problem);
PathGrid default_oracle_grid(Problem problem);

struct RiskReport {
  std::vector<long> n_grid;
  long reps = 0;
  std::vector<double> two_stage_mean_excess;
  std::vector<double> one_stage_mean_excess;
  double two_slope = 0.0, two_se = 0.0, two_target = 0.0;
  double one_slope = 0.0, one_se = 0.0, one_target = 0.0;
  std::optional<long> crossover_n;  // smallest grid n where two-stage wins
  long vacuous_count = 0;
};

// Exact excess misclassification risk of the plug-in classifier vs the
// one-stage classifier trained under the oracle design.
RiskReport excess_risk_experiment(const ModelSpec& model, const TwoStageConfig& tpl,
                                  const std::vector<long>& n_grid, long reps,
                                  const DesignSpec& oracle_design, std::uint64_t seed, int jobs);

struct Prop33Report {
  std::vector<long> n_grid;
  long reps = 0;
  double h = 1.0;
  double pi0_sq = 0.0;  // limit variance target
  std::vector<double> var_T;
  std::vector<double> skewness;
};

// Distribution of the criterion-difference statistic T_{n2} between the
// plug-in center and the true change point; its variance targets
// pi0^2 = sigma^2 p^gamma (1-p)^{1-2 xi} |h| / K.
Prop33Report prop33_experiment(double h, const std::vector<long>& n_grid, long reps,
                               const ModelSpec& cp_model, double p, double gamma, double K,
                               std::uint64_t seed, int jobs);

struct AsymmetryReport {
  std::vector<long> n_grid;
  long reps = 0;
  double a1 = 2.0, a2 = 1.0, bin = 0.1, d0 = 0.5;
  double d_star = 0.0;  // d0 + (a1-a2)*b/(a1+a2)
  std::vector<double> mean_d1;
};

// One-stage binned mode search on the asymmetric exponential signal; the
// criterion's population maximizer sits at d_star, not d0.
AsymmetryReport asymmetry_bias_experiment(double a1, double a2, double bin, double d0,
                                          double sigma, const std::vector<long>& n_grid,
                                          long reps, std::uint64_t seed, int jobs);

// Theoretical slope targets for d2-d0 (and the one-stage control).
double target_two_stage_slope(const ModelSpec& model, const TwoStageConfig& cfg);
double target_one_stage_slope(const ModelSpec& model);

// Finite-n plug-in of the limit constant for the problem, using p = n1/n.
double limit_scale_constant(const ModelSpec& model, const TwoStageConfig& cfg, long n1, long n);

}  // namespace mstage
