#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

#include "mstage/rng.hpp"

namespace mstage {

// Experiment-level failures: parameter gates and degenerate limit laws.
// The CLI maps these to exit code 2.
struct gate_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct degenerate_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Problem { ChangePoint, InverseIsotonic, Classification, Mode };

struct PathGrid {
  double step = 1e-3;
  double range = 8.0;  // simulate on [-range, range]
  void validate() const;
  long cells_per_side() const;
};

// All four limit laws are extrema of two-sided Brownian motion and differ
// only by drift shape, extremum sign and scale.
enum class DriftFamily { AbsSlope, Quadratic };
enum class ExtremumSign { Min, Max };

struct DriftSpec {
  DriftFamily family = DriftFamily::AbsSlope;
  double c = 1.0;  // drift coefficient, > 0
  ExtremumSign sign = ExtremumSign::Min;
  double diffusion = 1.0;  // a in a*B(h)
};

struct ArgextDraw {
  double location = 0.0;
  bool boundary = false;  // extremum landed on the last grid cell
};

// One draw of argext_h { a*B(h) +- drift(h) } on the grid; smallest
// extremizer on ties.
ArgextDraw argext_two_sided_bm(const DriftSpec& drift, const PathGrid& grid, Rng& rng);

// Batch of draws with monitored truncation: throws if more than 0.1% of the
// extrema land on the grid boundary.
Eigen::ArrayXd simulate_argext(const DriftSpec& drift, const PathGrid& grid, long draws,
                               Rng& rng, long* boundary_hits = nullptr);

// lambda0 = 8*K*sigma^2 / (c0^2 * (1-p) * p^gamma); a non-uniform
// second-stage design density psi divides it by 2*psi(0).
double changepoint_scale(double K, double sigma, double c0, double p, double gamma,
                         std::optional<double> psi0 = {});

// (8*sigma^2*K / (r'(d0)^2 * p^gamma * (1-p)))^{1/3}
double isotonic_scale(double K, double sigma, double r_prime_d0, double p, double gamma);

// isotonic constant with the Bernoulli conditional variance r(d0)(1-r(d0))
// in the sigma^2 slot
double classification_scale(double K, double r_d0, double r_prime_d0, double p, double gamma);

struct ModeScales {
  double a = 0.0;                   // sqrt(2*(m^2(d0+b) + sigma^2))
  double c = 0.0;                   // -m'(d0+b)
  double two_stage_constant = 0.0;  // (4K(m^2(d0)+sigma^2)/(m'(d0+)^2 p^gamma (1-p)))^{1/3}
};
ModeScales mode_scales(double K, double b, double m_d0, double m_d0_plus_b,
                       double m_prime_d0_plus, double m_prime_d0_plus_b, double sigma, double p,
                       double gamma);

// One-stage pair (a, c) alone; valid for smooth profiles too.
ModeScales mode_onestage_scales(double m_d0_plus_b, double m_prime_d0_plus_b, double sigma);

// Stage-one budget fraction minimizing the limiting variance.
double optimal_p(Problem problem, std::optional<double> xi = {});

}  // namespace mstage
