#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mstage/estimators.hpp"
#include "mstage/rng.hpp"

using namespace mstage;

namespace {

SampleBatch make_batch(std::vector<double> x, std::vector<double> y) {
  SampleBatch b;
  b.x = Eigen::Map<Eigen::ArrayXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  b.y = Eigen::Map<Eigen::ArrayXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  return b;
}

struct SortedXY {
  std::vector<double> x, y;
};

SortedXY sorted_xy(const SampleBatch& b) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(b.x.size()));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    return b.x[static_cast<Eigen::Index>(i)] < b.x[static_cast<Eigen::Index>(j)];
  });
  SortedXY s;
  for (std::size_t k : idx) {
    s.x.push_back(b.x[static_cast<Eigen::Index>(k)]);
    s.y.push_back(b.y[static_cast<Eigen::Index>(k)]);
  }
  return s;
}

// independent oracle: naive scan over every admissible split
SplitFit brute_force_joint(const SampleBatch& b) {
  const SortedXY s = sorted_xy(b);
  const std::size_t n = s.x.size();
  SplitFit best;
  double best_sse = 1e300;
  for (std::size_t i = 1; i < n; ++i) {
    if (s.x[i - 1] == s.x[i]) continue;
    double ma = 0, mb = 0;
    for (std::size_t j = 0; j < i; ++j) ma += s.y[j];
    for (std::size_t j = i; j < n; ++j) mb += s.y[j];
    ma /= static_cast<double>(i);
    mb /= static_cast<double>(n - i);
    double sse = 0;
    for (std::size_t j = 0; j < i; ++j) sse += (s.y[j] - ma) * (s.y[j] - ma);
    for (std::size_t j = i; j < n; ++j) sse += (s.y[j] - mb) * (s.y[j] - mb);
    if (sse < best_sse) {
      best_sse = sse;
      best = SplitFit{ma, mb, s.x[i - 1], sse, static_cast<Eigen::Index>(i)};
    }
  }
  return best;
}

}  // namespace

TEST_CASE("joint change-point fit: perfect two-level separation") {
  const SampleBatch b = make_batch({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1});
  const SplitFit f = fit_changepoint_joint(b);
  CHECK(f.d_hat == 0.2);
  CHECK(f.alpha_hat == 0.0);
  CHECK(f.beta_hat == 1.0);
  CHECK(f.sse == 0.0);
  CHECK(f.split_index == 2);
}

TEST_CASE("joint change-point fit: constant y ties break to the smallest split") {
  const SampleBatch b = make_batch({0.4, 0.1, 0.7, 0.3}, {0.7, 0.7, 0.7, 0.7});
  const SplitFit f = fit_changepoint_joint(b);
  CHECK(f.d_hat == 0.1);
  CHECK(f.sse == 0.0);
}

TEST_CASE("joint change-point fit: errors on degenerate input") {
  CHECK_THROWS_AS(fit_changepoint_joint(make_batch({0.5}, {1.0})), std::invalid_argument);
  CHECK_THROWS_AS(fit_changepoint_joint(make_batch({0.5, 0.5, 0.5}, {1.0, 2.0, 3.0})),
                  std::invalid_argument);
}

TEST_CASE("joint change-point fit matches the brute-force oracle on noisy data") {
  Rng rng(77);
  for (int rep = 0; rep < 50; ++rep) {
    const long n = 10 + static_cast<long>(rng.uniform01() * 40);
    SampleBatch b;
    b.x.resize(n);
    b.y.resize(n);
    const double d0 = rng.uniform(0.2, 0.8);
    for (long i = 0; i < n; ++i) {
      b.x[i] = rng.uniform01();
      b.y[i] = (b.x[i] > d0 ? 1.0 : 0.0) + 0.5 * rng.normal();
    }
    const SplitFit f = fit_changepoint_joint(b);
    const SplitFit o = brute_force_joint(b);
    CHECK(f.sse == doctest::Approx(o.sse).epsilon(1e-9));
    CHECK(f.sse <= o.sse + 1e-12);
    CHECK(f.d_hat == o.d_hat);
  }
}

TEST_CASE("plug-in fit: noiseless straddling window") {
  // exact alpha/beta, zero noise: the largest x <= d0 inside the window wins
  const SampleBatch b =
      make_batch({0.42, 0.47, 0.49, 0.53, 0.58}, {0.0, 0.0, 0.0, 1.0, 1.0});
  const WindowFit f = fit_changepoint_plugin(b, 0.0, 1.0, Interval{0.4, 0.6, false});
  CHECK_FALSE(f.vacuous);
  CHECK(f.d_hat == 0.49);
}

TEST_CASE("plug-in fit: vacuous window returns the midpoint with a flag") {
  const SampleBatch b = make_batch({0.1, 0.2}, {0.0, 1.0});
  const WindowFit f = fit_changepoint_plugin(b, 0.0, 1.0, Interval{0.6, 0.8, false});
  CHECK(f.vacuous);
  CHECK(f.d_hat == doctest::Approx(0.7));
}

TEST_CASE("plug-in fit: equal alpha and beta is a precondition violation") {
  const SampleBatch b = make_batch({0.1, 0.2}, {0.0, 1.0});
  CHECK_THROWS_AS(fit_changepoint_plugin(b, 0.5, 0.5, Interval{0.0, 1.0, false}),
                  std::invalid_argument);
}

TEST_CASE("plug-in fit: full SSE and simplified criterion share their argmin") {
  Rng rng(123);
  for (int rep = 0; rep < 50; ++rep) {
    const long n = 20 + static_cast<long>(rng.uniform01() * 60);
    SampleBatch b;
    b.x.resize(n);
    b.y.resize(n);
    const double d0 = 0.5;
    const double gap = rng.uniform(0.2, 1.0);
    for (long i = 0; i < n; ++i) {
      b.x[i] = rng.uniform(0.3, 0.7);
      b.y[i] = (b.x[i] > d0 ? gap : 0.0) + 0.3 * rng.normal();
    }
    const double alpha = 0.0 + 0.05 * rng.normal();
    const double beta = gap + 0.05 * rng.normal();
    const Interval w{0.35, 0.65, false};

    // brute force both criteria over the full candidate set
    const SortedXY s = sorted_xy(b);
    std::vector<double> cand{w.lo};
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (s.x[i] >= w.lo && s.x[i] <= w.hi) cand.push_back(s.x[i]);
    cand.push_back(w.hi);

    const auto sse = [&](double d) {
      double v = 0;
      for (std::size_t i = 0; i < s.x.size(); ++i)
        v += s.x[i] <= d ? (s.y[i] - alpha) * (s.y[i] - alpha)
                         : (s.y[i] - beta) * (s.y[i] - beta);
      return v;
    };
    const auto simplified = [&](double d) {
      const double sgn = beta > alpha ? 1.0 : -1.0;
      double v = 0;
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (s.x[i] <= d) v += s.y[i] - 0.5 * (alpha + beta);
      return sgn * v;
    };
    double best1 = 1e300, d1 = 0, best2 = 1e300, d2 = 0;
    for (double d : cand) {
      if (sse(d) < best1) { best1 = sse(d); d1 = d; }
      if (simplified(d) < best2) { best2 = simplified(d); d2 = d; }
    }
    CHECK(d1 == d2);
    const WindowFit f = fit_changepoint_plugin(b, alpha, beta, w);
    CHECK(f.d_hat == d1);
  }
}

TEST_CASE("pava pools a single violation") {
  Eigen::ArrayXd v(3), w(3);
  v << 1, 3, 2;
  w << 1, 1, 1;
  const Eigen::ArrayXd out = pava(v, w);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 2.5);
  CHECK(out[2] == 2.5);
}

TEST_CASE("pava leaves nondecreasing input untouched, bit for bit") {
  Eigen::ArrayXd v(5), w(5);
  v << -1.0, 0.3, 0.3, 0.7, 2.0;
  w << 2, 1, 3, 1, 1;
  const Eigen::ArrayXd out = pava(v, w);
  for (Eigen::Index i = 0; i < v.size(); ++i) CHECK(out[i] == v[i]);
}

TEST_CASE("pava is exactly idempotent") {
  Rng rng(9);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.uniform01() * 30);
    Eigen::ArrayXd v(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      v[i] = rng.normal();
      w[i] = rng.uniform(0.1, 3.0);
    }
    const Eigen::ArrayXd once = pava(v, w);
    const Eigen::ArrayXd twice = pava(once, w);
    for (Eigen::Index i = 0; i < n; ++i) CHECK(once[i] == twice[i]);
  }
}

TEST_CASE("pava preserves the weighted mean and commutes with affine maps") {
  Rng rng(10);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.uniform01() * 20);
    Eigen::ArrayXd v(n), w(n), ones = Eigen::ArrayXd::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      v[i] = rng.normal();
      w[i] = rng.uniform(0.5, 2.0);
    }
    const Eigen::ArrayXd out = pava(v, w);
    CHECK(std::abs((w * out).sum() - (w * v).sum()) <= 1e-12 * (1.0 + (w * v.abs()).sum()));

    const double a = rng.uniform(0.1, 2.0), c = rng.normal();
    const Eigen::ArrayXd lhs = pava(a * v + c, ones);
    const Eigen::ArrayXd rhs = a * pava(v, ones) + c;
    for (Eigen::Index i = 0; i < n; ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
  }
}

namespace {

// exhaustive level-set projection: all contiguous partitions, feasible block
// means, minimal weighted SSE
Eigen::ArrayXd brute_force_isotonic(const Eigen::ArrayXd& v, const Eigen::ArrayXd& w) {
  const int n = static_cast<int>(v.size());
  double best_sse = 1e300;
  Eigen::ArrayXd best = v;
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<int> bounds{0};
    for (int i = 0; i < n - 1; ++i)
      if (mask & (1u << i)) bounds.push_back(i + 1);
    bounds.push_back(n);
    Eigen::ArrayXd fit(n);
    bool feasible = true;
    double prev = -1e300;
    for (std::size_t bi = 0; bi + 1 < bounds.size(); ++bi) {
      double sw = 0, swy = 0;
      for (int i = bounds[bi]; i < bounds[bi + 1]; ++i) {
        sw += w[i];
        swy += w[i] * v[i];
      }
      const double m = swy / sw;
      if (m < prev - 1e-12) {
        feasible = false;
        break;
      }
      prev = m;
      for (int i = bounds[bi]; i < bounds[bi + 1]; ++i) fit[i] = m;
    }
    if (!feasible) continue;
    const double sse = (w * (v - fit).square()).sum();
    if (sse < best_sse) {
      best_sse = sse;
      best = fit;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("pava agrees with the exhaustive level-set projection (spot sample)") {
  Rng rng(12);
  for (int len = 1; len <= 4; ++len) {
    const int total = static_cast<int>(std::pow(3, len));
    for (int code = 0; code < total; ++code) {
      Eigen::ArrayXd v(len), w(len);
      int c = code;
      for (int i = 0; i < len; ++i) {
        v[i] = c % 3;
        c /= 3;
        w[i] = 1.0;
      }
      const Eigen::ArrayXd got = pava(v, w);
      const Eigen::ArrayXd want = brute_force_isotonic(v, w);
      for (int i = 0; i < len; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-9);
    }
  }
  // random positive weights
  for (int rep = 0; rep < 200; ++rep) {
    const int len = 2 + static_cast<int>(rng.uniform01() * 5);
    Eigen::ArrayXd v(len), w(len);
    for (int i = 0; i < len; ++i) {
      v[i] = std::floor(rng.uniform(0.0, 3.0));
      w[i] = rng.uniform(0.1, 2.0);
    }
    const Eigen::ArrayXd got = pava(v, w);
    const Eigen::ArrayXd want = brute_force_isotonic(v, w);
    for (int i = 0; i < len; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-9);
  }
}

TEST_CASE("step function evaluation and inverse conventions") {
  StepFunction f;
  f.lo = 0.0;
  f.hi = 1.0;
  f.knots.resize(1);
  f.knots << 0.5;
  f.levels.resize(2);
  f.levels << 0.2, 0.6;
  CHECK(f(0.0) == 0.2);
  CHECK(f(0.49) == 0.2);
  CHECK(f(0.5) == 0.6);  // right continuous
  CHECK(f(1.0) == 0.6);
  CHECK(isotonic_inverse(f, 0.4) == 0.5);
  CHECK(isotonic_inverse(f, 0.7) == 1.0);   // fit <= t0 everywhere
  CHECK(isotonic_inverse(f, 0.1) == 0.0);   // fit > t0 everywhere
}

TEST_CASE("inverse/forward consistency at knots") {
  Rng rng(13);
  for (int rep = 0; rep < 50; ++rep) {
    const long n = 5 + static_cast<long>(rng.uniform01() * 40);
    SampleBatch b;
    b.x.resize(n);
    b.y.resize(n);
    for (long i = 0; i < n; ++i) {
      b.x[i] = rng.uniform01();
      b.y[i] = b.x[i] + 0.3 * rng.normal();
    }
    const StepFunction f = isotonic_fit(b, 0.0, 1.0);
    for (Eigen::Index k = -1; k < f.knots.size(); ++k) {
      const double t0 = k < 0 ? f.levels[0] : f.levels[k + 1];
      const double inv = isotonic_inverse(f, t0);
      const double eps = 1e-9;
      // r(d) <= t0  <=>  d <= inv
      for (double d : {inv - eps, inv + eps, f.lo, f.hi}) {
        if (d < f.lo || d > f.hi) continue;
        CHECK((f(d) <= t0) == (d <= inv));
      }
    }
  }
}

TEST_CASE("switching argmin honors the cumulative-sum conventions") {
  // all responses below the level: process decreases, largest x wins
  const SampleBatch lo = make_batch({0.3, 0.1, 0.7}, {0.0, 0.1, 0.2});
  CHECK(switching_argmin(lo, 0.9) == 0.7);
  // all responses above: process increases, smallest x wins
  const SampleBatch hi = make_batch({0.3, 0.1, 0.7}, {1.0, 0.9, 1.2});
  CHECK(switching_argmin(hi, 0.5) == 0.1);
}

TEST_CASE("switching argmin and isotonic inverse land on adjacent order statistics") {
  Rng rng(14);
  for (int rep = 0; rep < 100; ++rep) {
    const long n = 20 + static_cast<long>(rng.uniform01() * 100);
    SampleBatch b;
    b.x.resize(n);
    b.y.resize(n);
    for (long i = 0; i < n; ++i) {
      b.x[i] = rng.uniform01();
      b.y[i] = b.x[i] + 0.1 * rng.normal();
    }
    const double t0 = 0.5;
    const SortedXY s = sorted_xy(b);
    const StepFunction f = isotonic_fit(b, 0.0, 1.0);
    const double inv = isotonic_inverse(f, t0);
    const double sw = switching_argmin(b, t0);

    const auto index_of = [&](double v, bool is_inverse) -> long {
      if (is_inverse && v == f.lo) return 0;
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (s.x[i] == v) return static_cast<long>(i) + 1;
      return static_cast<long>(n) + 1;  // domain right endpoint
    };
    const long gap = std::abs(index_of(inv, true) - index_of(sw, false));
    CHECK(gap <= 1);
  }
}

TEST_CASE("shorth mode: single point, wide search") {
  const SampleBatch b = make_batch({0.5}, {1.0});
  const WindowFit f = shorth_mode(b, 0.1, Interval{0.0, 1.0, false});
  CHECK_FALSE(f.vacuous);
  CHECK(f.d_hat == doctest::Approx(0.4));
}

TEST_CASE("shorth mode: all-zero responses give the smallest candidate") {
  const SampleBatch b = make_batch({0.4, 0.6}, {0.0, 0.0});
  const WindowFit f = shorth_mode(b, 0.05, Interval{0.2, 0.8, false});
  CHECK_FALSE(f.vacuous);
  CHECK(f.d_hat == 0.2);
}

TEST_CASE("shorth mode: no data candidate in the search window") {
  const SampleBatch b = make_batch({0.05, 0.95}, {1.0, 1.0});
  const WindowFit f = shorth_mode(b, 0.01, Interval{0.4, 0.6, false});
  CHECK(f.vacuous);
  CHECK(f.d_hat == doctest::Approx(0.5));
}

TEST_CASE("shorth mode: noiseless tent on a regular grid recovers the peak") {
  const long m = 400;
  SampleBatch b;
  b.x.resize(m + 1);
  b.y.resize(m + 1);
  const double d0 = 0.37;
  for (long i = 0; i <= m; ++i) {
    const double x = static_cast<double>(i) / m;
    b.x[i] = x;
    b.y[i] = std::max(0.0, 1.0 - std::abs(x - d0) / 0.3);
  }
  const double bin = 0.15;
  const WindowFit f = shorth_mode(b, bin, Interval{bin, 1.0 - bin, false});
  CHECK(std::abs(f.d_hat - d0) <= 1.0 / m + 1e-12);
}

TEST_CASE("shorth mode matches a dense-grid brute force") {
  Rng rng(15);
  for (int rep = 0; rep < 100; ++rep) {
    const long n = 20 + static_cast<long>(rng.uniform01() * 180);
    SampleBatch b;
    b.x.resize(n);
    b.y.resize(n);
    const double d0 = rng.uniform(0.3, 0.7);
    for (long i = 0; i < n; ++i) {
      b.x[i] = rng.uniform01();
      b.y[i] = std::exp(-std::abs(b.x[i] - d0)) + 0.3 * rng.normal();
    }
    const double bin = rng.uniform(0.05, 0.2);
    const Interval search{bin, 1.0 - bin, false};
    const WindowFit f = shorth_mode(b, bin, search);

    const long grid = 10000;
    const SortedXY s = sorted_xy(b);
    double best = -1e300, best_d = search.lo;
    for (long g = 0; g <= grid; ++g) {
      const double d = search.lo + (search.hi - search.lo) * static_cast<double>(g) / grid;
      double v = 0;
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (std::abs(s.x[i] - d) <= bin) v += s.y[i];
      if (v > best) {
        best = v;
        best_d = d;
      }
    }
    const double spacing = (search.hi - search.lo) / static_cast<double>(grid);
    CHECK(std::abs(f.d_hat - best_d) <= spacing + 1e-12);
  }
}
