#pragma once

#include <Eigen/Dense>

#include "mstage/model.hpp"

namespace mstage {

// Joint least-squares change-point fit over all splits between consecutive
// order statistics.
struct SplitFit {
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  double d_hat = 0.0;
  double sse = 0.0;
  Eigen::Index split_index = 0;  // number of points in the left segment
};

// All argmin/argmax results carry a vacuous flag instead of erroring when a
// window contains no data; the harness counts those events.
struct WindowFit {
  double d_hat = 0.0;
  bool vacuous = false;
};

// Piecewise-constant right-continuous step function on [lo, hi].
// levels has knots.size()+1 entries; knots are interior breakpoints, the
// value on [knot_i, knot_{i+1}) is levels[i+1].
struct StepFunction {
  Eigen::ArrayXd knots;
  Eigen::ArrayXd levels;
  double lo = 0.0;
  double hi = 1.0;

  double operator()(double x) const;
};

SplitFit fit_changepoint_joint(const SampleBatch& batch);

// argmin over the window of the plug-in split SSE; candidates are the
// second-stage order statistics inside the window plus both endpoints.
WindowFit fit_changepoint_plugin(const SampleBatch& batch2, double alpha_hat, double beta_hat,
                                 const Interval& window);

// Weighted least-squares projection onto the nondecreasing cone.
Eigen::ArrayXd pava(const Eigen::ArrayXd& values, const Eigen::ArrayXd& weights);

// Isotonic regression of y on x as a right-continuous step function on
// [lo, hi]; duplicate x values are pooled with weights before projection.
StepFunction isotonic_fit(const SampleBatch& batch, double lo, double hi);

// sup{d in [lo,hi] : fit(d) <= t0}; lo when fit > t0 everywhere, hi when
// fit <= t0 everywhere.
double isotonic_inverse(const StepFunction& fit, double t0);

// Smallest minimizer over the sorted x values of V0(x) - t0*G0(x), the
// cumulative sum processes of the switching relation.
double switching_argmin(const SampleBatch& batch, double t0);

// Smallest maximizer of the binned response sum over candidates
// {x_i - b} u {x_i + b} u {search endpoints} restricted to the search window.
WindowFit shorth_mode(const SampleBatch& batch, double halfwidth, const Interval& search);

}  // namespace mstage
