#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mstage {

inline double mean(const Eigen::ArrayXd& v) { return v.mean(); }

// unbiased sample variance
inline double variance(const Eigen::ArrayXd& v) {
  if (v.size() < 2) return 0.0;
  const double m = v.mean();
  return (v - m).square().sum() / static_cast<double>(v.size() - 1);
}

inline double rmse(const Eigen::ArrayXd& errors) {
  return std::sqrt(errors.square().mean());
}

// g1 = m3 / m2^{3/2}
inline double sample_skewness(const Eigen::ArrayXd& v) {
  const double m = v.mean();
  const Eigen::ArrayXd c = v - m;
  const double m2 = c.square().mean();
  const double m3 = c.cube().mean();
  return m3 / std::pow(m2, 1.5);
}

// Order-statistic quantile with linear interpolation at h = q*(n-1).
inline double empirical_quantile(const Eigen::ArrayXd& samples, double q) {
  if (samples.size() == 0) throw std::invalid_argument("empirical_quantile: empty sample");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("empirical_quantile: q must be in (0,1)");
  std::vector<double> s(samples.data(), samples.data() + samples.size());
  std::sort(s.begin(), s.end());
  const double h = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  const double w = h - static_cast<double>(lo);
  return (1.0 - w) * s[lo] + w * s[hi];
}

// Two-sample Kolmogorov-Smirnov statistic, sup_x |F1(x) - F2(x)|.
inline double ks_two_sample(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> x(a.data(), a.data() + a.size());
  std::vector<double> y(b.data(), b.data() + b.size());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

struct LogLogFit {
  double slope = 0.0;
  double se = 0.0;
  double intercept = 0.0;
};

// OLS of log(y) on log(x); se is the usual slope standard error.
inline LogLogFit fit_loglog(const std::vector<long>& n_grid, const std::vector<double>& y) {
  const auto k = n_grid.size();
  if (k != y.size() || k < 3) throw std::invalid_argument("fit_loglog: need >=3 matched points");
  Eigen::ArrayXd lx(k), ly(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(y[i] > 0.0)) throw std::invalid_argument("fit_loglog: y must be positive");
    lx[i] = std::log(static_cast<double>(n_grid[i]));
    ly[i] = std::log(y[i]);
  }
  const double mx = lx.mean(), my = ly.mean();
  const double sxx = (lx - mx).square().sum();
  const double sxy = ((lx - mx) * (ly - my)).sum();
  LogLogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const Eigen::ArrayXd resid = ly - (f.intercept + f.slope * lx);
  const double dof = static_cast<double>(k) - 2.0;
  f.se = std::sqrt(resid.square().sum() / dof / sxx);
  return f;
}

}  // namespace mstage
