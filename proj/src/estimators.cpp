#include "mstage/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mstage {

namespace {

// (x, y) pairs sorted by x; ties keep generation order for determinism.
struct Sorted {
  std::vector<double> x, y;
};

Sorted sort_by_x(const SampleBatch& batch) {
  const auto n = static_cast<std::size_t>(batch.x.size());
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    if (batch.x[static_cast<Eigen::Index>(i)] != batch.x[static_cast<Eigen::Index>(j)])
      return batch.x[static_cast<Eigen::Index>(i)] < batch.x[static_cast<Eigen::Index>(j)];
    return i < j;
  });
  Sorted s;
  s.x.resize(n);
  s.y.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    s.x[k] = batch.x[static_cast<Eigen::Index>(idx[k])];
    s.y[k] = batch.y[static_cast<Eigen::Index>(idx[k])];
  }
  return s;
}

}  // namespace

SplitFit fit_changepoint_joint(const SampleBatch& batch) {
  const auto n = static_cast<std::size_t>(batch.x.size());
  if (n < 2) throw std::invalid_argument("no admissible split");
  const Sorted s = sort_by_x(batch);
  if (s.x.front() == s.x.back()) throw std::invalid_argument("no admissible split");

  // Welford prefix/suffix sums of squares; exact zero for constant segments.
  std::vector<double> mean_l(n + 1, 0.0), m2_l(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double delta = s.y[i] - mean_l[i];
    mean_l[i + 1] = mean_l[i] + delta / static_cast<double>(i + 1);
    m2_l[i + 1] = m2_l[i] + delta * (s.y[i] - mean_l[i + 1]);
  }
  std::vector<double> mean_r(n + 1, 0.0), m2_r(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t cnt = n - i;
    const double delta = s.y[i] - mean_r[i + 1];
    mean_r[i] = mean_r[i + 1] + delta / static_cast<double>(cnt);
    m2_r[i] = m2_r[i + 1] + delta * (s.y[i] - mean_r[i]);
  }

  SplitFit best;
  double best_sse = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t i = 1; i < n; ++i) {
    if (s.x[i - 1] == s.x[i]) continue;  // split must separate distinct x
    const double sse = m2_l[i] + m2_r[i];
    if (sse < best_sse) {
      best_sse = sse;
      best.alpha_hat = mean_l[i];
      best.beta_hat = mean_r[i];
      best.d_hat = s.x[i - 1];
      best.sse = sse;
      best.split_index = static_cast<Eigen::Index>(i);
      found = true;
    }
  }
  if (!found) throw std::invalid_argument("no admissible split");
  return best;
}

WindowFit fit_changepoint_plugin(const SampleBatch& batch2, double alpha_hat, double beta_hat,
                                 const Interval& window) {
  if (alpha_hat == beta_hat)
    throw std::invalid_argument("fit_changepoint_plugin: alpha_hat == beta_hat");
  if (!(window.lo <= window.hi))
    throw std::invalid_argument("fit_changepoint_plugin: empty window");
  const Sorted s = sort_by_x(batch2);
  const std::size_t n = s.x.size();

  // prefix sums of the two squared residuals
  std::vector<double> pa(n + 1, 0.0), pb(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double ra = s.y[i] - alpha_hat;
    const double rb = s.y[i] - beta_hat;
    pa[i + 1] = pa[i] + ra * ra;
    pb[i + 1] = pb[i] + rb * rb;
  }

  const auto first_in = static_cast<std::size_t>(
      std::lower_bound(s.x.begin(), s.x.end(), window.lo) - s.x.begin());
  const auto last_in = static_cast<std::size_t>(
      std::upper_bound(s.x.begin(), s.x.end(), window.hi) - s.x.begin());
  if (first_in == last_in) return {window.mid(), true};

  // candidates in ascending order: lo, order statistics inside, hi
  std::vector<double> cand;
  cand.reserve(last_in - first_in + 2);
  cand.push_back(window.lo);
  for (std::size_t i = first_in; i < last_in; ++i) cand.push_back(s.x[i]);
  cand.push_back(window.hi);

  const auto sse_at = [&](double d) {
    const auto k = static_cast<std::size_t>(
        std::upper_bound(s.x.begin(), s.x.end(), d) - s.x.begin());
    return pa[k] + (pb[n] - pb[k]);
  };

  double best_d = cand.front();
  double best = sse_at(best_d);
  for (std::size_t i = 1; i < cand.size(); ++i) {
    const double v = sse_at(cand[i]);
    if (v < best) {
      best = v;
      best_d = cand[i];
    }
  }
  return {best_d, false};
}

Eigen::ArrayXd pava(const Eigen::ArrayXd& values, const Eigen::ArrayXd& weights) {
  const Eigen::Index n = values.size();
  if (n == 0 || weights.size() != n)
    throw std::invalid_argument("pava: values and weights must have equal positive length");
  if ((weights <= 0.0).any()) throw std::invalid_argument("pava: weights must be > 0");

  struct Block {
    double mean, weight;
    Eigen::Index count;
  };
  std::vector<Block> blocks;
  blocks.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    blocks.push_back({values[i], weights[i], 1});
    // merge only on strict violation so an already-monotone input (and any
    // previous pava output) passes through bit-exactly
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double w = a.weight + b.weight;
      a.mean = (a.weight * a.mean + b.weight * b.mean) / w;
      a.weight = w;
      a.count += b.count;
    }
  }
  Eigen::ArrayXd out(n);
  Eigen::Index pos = 0;
  for (const Block& b : blocks)
    for (Eigen::Index j = 0; j < b.count; ++j) out[pos++] = b.mean;
  return out;
}

double StepFunction::operator()(double x) const {
  if (!(x >= lo && x <= hi)) throw std::domain_error("StepFunction: x outside domain");
  // first knot strictly greater than x indexes the cell
  const double* begin = knots.data();
  const double* end = begin + knots.size();
  const auto cell = static_cast<Eigen::Index>(std::upper_bound(begin, end, x) - begin);
  return levels[cell];
}

StepFunction isotonic_fit(const SampleBatch& batch, double lo, double hi) {
  const auto n = static_cast<std::size_t>(batch.x.size());
  if (n == 0) throw std::invalid_argument("isotonic_fit: empty batch");
  const Sorted s = sort_by_x(batch);

  // pool duplicate x into weighted points
  std::vector<double> ux, uy, uw;
  ux.reserve(n);
  uy.reserve(n);
  uw.reserve(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < n && s.x[j] == s.x[i]) sum += s.y[j++];
    ux.push_back(s.x[i]);
    uy.push_back(sum / static_cast<double>(j - i));
    uw.push_back(static_cast<double>(j - i));
    i = j;
  }
  const auto m = static_cast<Eigen::Index>(ux.size());
  Eigen::ArrayXd v = Eigen::Map<Eigen::ArrayXd>(uy.data(), m);
  Eigen::ArrayXd w = Eigen::Map<Eigen::ArrayXd>(uw.data(), m);
  const Eigen::ArrayXd fitted = pava(v, w);

  StepFunction f;
  f.lo = lo;
  f.hi = hi;
  f.knots.resize(m - 1);
  for (Eigen::Index i = 1; i < m; ++i) f.knots[i - 1] = ux[static_cast<std::size_t>(i)];
  f.levels = fitted;
  return f;
}

double isotonic_inverse(const StepFunction& fit, double t0) {
  if (fit.levels.size() == 0) throw std::invalid_argument("isotonic_inverse: empty fit");
  // levels are nondecreasing: find the first level above t0
  Eigen::Index k = 0;
  while (k < fit.levels.size() && fit.levels[k] <= t0) ++k;
  if (k == 0) return fit.lo;                  // fit > t0 everywhere
  if (k == fit.levels.size()) return fit.hi;  // fit <= t0 everywhere
  return fit.knots[k - 1];                    // sup of the region below t0
}

double switching_argmin(const SampleBatch& batch, double t0) {
  const auto n = static_cast<std::size_t>(batch.x.size());
  if (n == 0) throw std::invalid_argument("switching_argmin: empty batch");
  const Sorted s = sort_by_x(batch);
  double cum = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cum += s.y[i] - t0;
    if (cum < best) {
      best = cum;
      best_i = i;
    }
  }
  return s.x[best_i];
}

WindowFit shorth_mode(const SampleBatch& batch, double halfwidth, const Interval& search) {
  if (!(halfwidth > 0.0)) throw std::invalid_argument("shorth_mode: halfwidth must be > 0");
  if (!(search.lo <= search.hi)) throw std::invalid_argument("shorth_mode: empty search window");
  const Sorted s = sort_by_x(batch);
  const std::size_t n = s.x.size();

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + s.y[i];

  std::vector<double> cand;
  cand.reserve(2 * n + 2);
  bool any_data_candidate = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = s.x[i] - halfwidth;
    const double right = s.x[i] + halfwidth;
    if (left >= search.lo && left <= search.hi) {
      cand.push_back(left);
      any_data_candidate = true;
    }
    if (right >= search.lo && right <= search.hi) {
      cand.push_back(right);
      any_data_candidate = true;
    }
  }
  if (!any_data_candidate) return {search.mid(), true};
  cand.push_back(search.lo);
  cand.push_back(search.hi);
  std::sort(cand.begin(), cand.end());

  // bin membership |x - d| <= b with an ulp guard: the candidate d = x_i -+ b
  // must recover x_i as an endpoint despite rounding of the subtraction
  const auto crit = [&](double d) {
    const double tol = 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(d) + halfwidth + 1.0);
    const auto lo_i = static_cast<std::size_t>(
        std::lower_bound(s.x.begin(), s.x.end(), d - halfwidth - tol) - s.x.begin());
    const auto hi_i = static_cast<std::size_t>(
        std::upper_bound(s.x.begin(), s.x.end(), d + halfwidth + tol) - s.x.begin());
    return prefix[hi_i] - prefix[lo_i];
  };

  double best_d = cand.front();
  double best = crit(best_d);
  for (std::size_t i = 1; i < cand.size(); ++i) {
    if (cand[i] == cand[i - 1]) continue;
    const double v = crit(cand[i]);
    if (v > best) {
      best = v;
      best_d = cand[i];
    }
  }
  return {best_d, false};
}

}  // namespace mstage
