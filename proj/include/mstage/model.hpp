#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <utility>

#include "mstage/curves.hpp"
#include "mstage/rng.hpp"

namespace mstage {

enum class ModelKind { ChangePoint, Monotone, BinaryMonotone, Unimodal };
enum class NoiseKind { Gaussian, Uniform };

// One of four generative models.
//
//   ChangePoint     Y = alpha_base + c0*n^{-xi} * 1[x > d0] + sigma*eps
//   Monotone        Y = r(x) + sigma*eps,   r nondecreasing, target t0 = r(d0)
//   BinaryMonotone  Y ~ Bernoulli(r(x)),    t0 fixed at 1/2
//   Unimodal        Y = profile(|x - d0|) + sigma*eps
//                   (asym present: exp(-a1(d0-x)) left / exp(-a2(x-d0)) right)
//
// The change-point gap always uses the total budget n, not a per-stage count.
struct ModelSpec {
  ModelKind kind = ModelKind::ChangePoint;
  double d0 = 0.5;
  double sigma = 0.1;
  double alpha_base = 0.0;
  double c0 = 1.0;
  double xi = 0.0;
  CurveSpec curve;
  double t0 = 0.5;
  std::optional<std::pair<double, double>> asym;
  NoiseKind noise = NoiseKind::Gaussian;

  void validate() const;  // throws std::invalid_argument
};

enum class DesignKind { UniformGlobal, UniformZoom, SymmetricZoom };
enum class DensityKind { Triangular, TruncExp };

// Sampling designs. Support is always clipped to [0,1]; a proper clip is
// flagged. Sampling is by inverse CDF so every point costs exactly one
// uniform draw regardless of clipping.
struct DesignSpec {
  DesignKind kind = DesignKind::UniformGlobal;
  double a = 0.0, b = 1.0;                        // UniformGlobal
  double center = 0.5, halfwidth = 0.5;           // zoom designs
  DensityKind density = DensityKind::Triangular;  // SymmetricZoom
  double density_rate = 1.0;                      // TruncExp decay

  struct Support {
    double lo = 0.0, hi = 1.0;
    bool clipped = false;
  };
  Support support() const;  // throws on empty support
  double sample(Rng& rng) const;

  // density of the scaled variable w at 0 (psi(0) in the zoom designs)
  double density_at0() const;
  // unnormalized-to-normalized density g(w) on [-1,1], SymmetricZoom only
  double g(double w) const;
};

struct SampleBatch {
  Eigen::ArrayXd x;
  Eigen::ArrayXd y;
  int stage = 1;
  DesignSpec design;
  long n_budget = 0;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool clipped = false;
  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

// Noiseless regression mean at x for total budget n_budget.
double eval_mean(const ModelSpec& model, double x, long n_budget);

// i.i.d. x from the design, y from the model. Consumes exactly `count`
// response draws from rng.
SampleBatch sample_batch(const ModelSpec& model, const DesignSpec& design, long count,
                         long n_budget, Rng& rng);

// [d1 - H, d1 + H] with H = K*n1^{-gamma} (minus b for the mode search
// domain), intersected with [0,1].
Interval second_stage_interval(double d1_hat, double K, double gamma, long n1,
                               std::optional<double> shrink_by_b = {});

// Misclassification risk of f(x)=1[x >= threshold] under Uniform[0,1]
// test covariates.
double risk_uniform(const CurveSpec& curve, double threshold);
double risk_uniform_quadrature(const CurveSpec& curve, double threshold);

// risk_uniform(curve, a) - risk_uniform(curve, d0), computed without the
// cancellation of the two absolute risks.
double excess_risk(const CurveSpec& curve, double a, double d0);

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double abs_tol);

}  // namespace mstage
