#include "mstage/limit_laws.hpp"

#include <cmath>
#include <string>

namespace mstage {

void PathGrid::validate() const {
  if (!(step > 0.0) || !(range > 0.0)) throw std::invalid_argument("grid: step and range must be > 0");
  const double cells = range / step;
  if (std::abs(cells - std::round(cells)) > 1e-9 * cells || std::round(cells) < 10)
    throw std::invalid_argument("grid: range/step must be an integer count >= 10");
}

long PathGrid::cells_per_side() const { return std::lround(range / step); }

namespace {

inline double drift_at(const DriftSpec& d, double h) {
  const double base = d.family == DriftFamily::AbsSlope ? std::abs(h) : h * h;
  return d.c * base;
}

}  // namespace

ArgextDraw argext_two_sided_bm(const DriftSpec& drift, const PathGrid& grid, Rng& rng) {
  grid.validate();
  if (!(drift.c > 0.0)) throw std::invalid_argument("drift: c must be > 0");
  if (!(drift.diffusion > 0.0)) throw std::invalid_argument("drift: diffusion must be > 0");
  const long m = grid.cells_per_side();
  const double sd = drift.diffusion * std::sqrt(grid.step);
  const double flip = drift.sign == ExtremumSign::Min ? 1.0 : -1.0;

  // criterion = flip * (a*B + sign_adjusted_drift); always minimized.
  // Ties prefer the smallest h: the left walk moves away from 0, so it
  // updates on <=; the right walk updates on < only.
  double best = 0.0;  // value at h = 0
  double best_h = 0.0;
  bool at_boundary = false;

  double b = 0.0;
  for (long k = 1; k <= m; ++k) {
    b += sd * rng.normal();
    const double h = -static_cast<double>(k) * grid.step;
    const double v = flip * b + drift_at(drift, h);
    if (v <= best) {
      best = v;
      best_h = h;
      at_boundary = (k == m);
    }
  }
  b = 0.0;
  for (long k = 1; k <= m; ++k) {
    b += sd * rng.normal();
    const double h = static_cast<double>(k) * grid.step;
    const double v = flip * b + drift_at(drift, h);
    if (v < best) {
      best = v;
      best_h = h;
      at_boundary = (k == m);
    }
  }
  return {best_h, at_boundary};
}

Eigen::ArrayXd simulate_argext(const DriftSpec& drift, const PathGrid& grid, long draws,
                               Rng& rng, long* boundary_hits) {
  if (draws < 1) throw std::invalid_argument("simulate_argext: draws must be >= 1");
  Eigen::ArrayXd out(draws);
  long hits = 0;
  for (long i = 0; i < draws; ++i) {
    const ArgextDraw d = argext_two_sided_bm(drift, grid, rng);
    out[i] = d.location;
    if (d.boundary) ++hits;
  }
  if (boundary_hits) *boundary_hits = hits;
  if (static_cast<double>(hits) > 1e-3 * static_cast<double>(draws))
    throw degenerate_error("argext truncation: " + std::to_string(hits) + "/" +
                           std::to_string(draws) +
                           " extrema on the grid boundary (limit 0.1%); widen the grid range");
  return out;
}

double changepoint_scale(double K, double sigma, double c0, double p, double gamma,
                         std::optional<double> psi0) {
  if (!(K > 0.0 && c0 > 0.0 && p > 0.0 && p < 1.0 && gamma >= 0.0 && sigma >= 0.0))
    throw std::invalid_argument("changepoint_scale: bad parameters");
  double lambda0 = 8.0 * K * sigma * sigma / (c0 * c0 * (1.0 - p) * std::pow(p, gamma));
  if (psi0) {
    if (!(*psi0 > 0.0)) throw std::invalid_argument("changepoint_scale: psi0 must be > 0");
    lambda0 /= 2.0 * *psi0;
  }
  return lambda0;
}

double isotonic_scale(double K, double sigma, double r_prime_d0, double p, double gamma) {
  if (r_prime_d0 == 0.0) throw degenerate_error("flat curve at threshold");
  if (!(K > 0.0 && p > 0.0 && p < 1.0 && gamma >= 0.0 && sigma >= 0.0))
    throw std::invalid_argument("isotonic_scale: bad parameters");
  const double num = 8.0 * sigma * sigma * K;
  const double den = r_prime_d0 * r_prime_d0 * std::pow(p, gamma) * (1.0 - p);
  return std::cbrt(num / den);
}

double classification_scale(double K, double r_d0, double r_prime_d0, double p, double gamma) {
  if (!(r_d0 > 0.0 && r_d0 < 1.0))
    throw std::invalid_argument("classification_scale: r(d0) must lie in (0,1)");
  return isotonic_scale(K, std::sqrt(r_d0 * (1.0 - r_d0)), r_prime_d0, p, gamma);
}

ModeScales mode_onestage_scales(double m_d0_plus_b, double m_prime_d0_plus_b, double sigma) {
  if (!(m_prime_d0_plus_b < 0.0))
    throw std::invalid_argument("mode scales: m'(d0+b) must be negative");
  ModeScales s;
  s.a = std::sqrt(2.0 * (m_d0_plus_b * m_d0_plus_b + sigma * sigma));
  s.c = -m_prime_d0_plus_b;
  return s;
}

ModeScales mode_scales(double K, double b, double m_d0, double m_d0_plus_b,
                       double m_prime_d0_plus, double m_prime_d0_plus_b, double sigma, double p,
                       double gamma) {
  if (m_prime_d0_plus == 0.0) throw degenerate_error("cusp required");
  if (!(m_prime_d0_plus < 0.0))
    throw std::invalid_argument("mode_scales: m'(d0+) must be negative");
  if (!(K > b && b > 0.0)) throw std::invalid_argument("bin exceeds halfwidth");
  if (!(p > 0.0 && p < 1.0 && gamma >= 0.0 && sigma >= 0.0))
    throw std::invalid_argument("mode_scales: bad parameters");
  ModeScales s = mode_onestage_scales(m_d0_plus_b, m_prime_d0_plus_b, sigma);
  const double num = 4.0 * K * (m_d0 * m_d0 + sigma * sigma);
  const double den = m_prime_d0_plus * m_prime_d0_plus * std::pow(p, gamma) * (1.0 - p);
  s.two_stage_constant = std::cbrt(num / den);
  return s;
}

double optimal_p(Problem problem, std::optional<double> xi) {
  switch (problem) {
    case Problem::ChangePoint: {
      if (!xi) throw std::invalid_argument("optimal_p: changepoint requires xi");
      if (!(*xi >= 0.0 && *xi < 0.5))
        throw std::invalid_argument("optimal_p: xi must lie in [0, 1/2)");
      return (1.0 - 2.0 * *xi) / (2.0 * (1.0 - *xi));
    }
    case Problem::InverseIsotonic:
    case Problem::Classification:
    case Problem::Mode:
      return 0.25;  // exact maximizer of p^{1/3}(1-p)
  }
  throw std::logic_error("unreachable");
}

}  // namespace mstage
