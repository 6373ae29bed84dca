#include <doctest.h>

#include <cmath>

#include "mstage/config.hpp"
#include "mstage/model.hpp"
#include "mstage/stats.hpp"

using namespace mstage;

TEST_CASE("eval_mean change-point levels") {
  ModelSpec m = default_model(Problem::ChangePoint);
  m.alpha_base = 0.0;
  m.c0 = 1.0;
  m.d0 = 0.5;

  m.xi = 0.0;
  CHECK(eval_mean(m, 0.25, 100) == 0.0);  // left of the change point

  m.xi = 0.25;
  CHECK(eval_mean(m, 0.75, 16) == doctest::Approx(0.5).epsilon(1e-15));  // 16^{-1/4}

  // x == d0 belongs to the left level
  m.xi = 0.0;
  CHECK(eval_mean(m, 0.5, 100) == 0.0);
}

TEST_CASE("eval_mean unimodal profile at the peak") {
  ModelSpec m = default_model(Problem::Mode);
  m.d0 = 0.3;
  m.curve.family = CurveFamily::ExpCusp;
  m.curve.rate = 1.0;
  CHECK(eval_mean(m, 0.3, 50) == doctest::Approx(1.0));
}

TEST_CASE("unimodal symmetry about d0") {
  ModelSpec m = default_model(Problem::Mode);
  m.d0 = 0.37;
  Rng rng(5);
  for (auto fam : {CurveFamily::ExpCusp, CurveFamily::QuadCap}) {
    m.curve.family = fam;
    for (int i = 0; i < 200; ++i) {
      const double t = rng.uniform(0.0, std::min(m.d0, 1.0 - m.d0));
      CHECK(eval_mean(m, m.d0 + t, 100) == doctest::Approx(eval_mean(m, m.d0 - t, 100)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sample_batch: noiseless responses equal the mean") {
  ModelSpec m = default_model(Problem::InverseIsotonic);
  m.sigma = 0.0;
  DesignSpec d;
  d.kind = DesignKind::UniformGlobal;
  Rng rng(1);
  const SampleBatch b = sample_batch(m, d, 200, 1000, rng);
  for (Eigen::Index i = 0; i < b.x.size(); ++i)
    CHECK(b.y[i] == eval_mean(m, b.x[i], 1000));
}

TEST_CASE("sample_batch: uniform global mean near 1/2") {
  ModelSpec m = default_model(Problem::InverseIsotonic);
  DesignSpec d;
  d.kind = DesignKind::UniformGlobal;
  Rng rng(2);
  const long count = 10000;
  const SampleBatch b = sample_batch(m, d, count, 1000, rng);
  const double tol = 4.0 * std::sqrt(1.0 / 12.0) / std::sqrt(static_cast<double>(count));
  CHECK(std::abs(b.x.mean() - 0.5) < tol);
}

TEST_CASE("sample_batch: degenerate Bernoulli") {
  ModelSpec m = default_model(Problem::Classification);
  m.curve.family = CurveFamily::Linear;
  m.curve.slope = 0.0;
  m.curve.intercept = 1.0;  // r == 1
  DesignSpec d;
  d.kind = DesignKind::UniformGlobal;
  Rng rng(3);
  const SampleBatch b = sample_batch(m, d, 500, 1000, rng);
  CHECK((b.y == 1.0).all());
}

TEST_CASE("sample_batch: symmetric zoom is symmetric about its center") {
  ModelSpec m = default_model(Problem::Mode);
  DesignSpec d;
  d.kind = DesignKind::SymmetricZoom;
  d.center = 0.5;
  d.halfwidth = 0.2;
  for (auto dens : {DensityKind::Triangular, DensityKind::TruncExp}) {
    d.density = dens;
    Rng rng(4);
    const long count = 20000;
    const SampleBatch b = sample_batch(m, d, count, 1000, rng);
    const Eigen::ArrayXd w = b.x - d.center;
    const double tol = 4.0 * std::sqrt(variance(w)) / std::sqrt(static_cast<double>(count));
    CHECK(std::abs(w.mean()) < tol);
    CHECK(b.x.minCoeff() >= 0.3);
    CHECK(b.x.maxCoeff() <= 0.7);
  }
}

TEST_CASE("symmetric densities integrate to one and are symmetric") {
  DesignSpec d;
  d.kind = DesignKind::SymmetricZoom;
  for (auto dens : {DensityKind::Triangular, DensityKind::TruncExp}) {
    d.density = dens;
    const double total = adaptive_simpson([&](double w) { return d.g(w); }, -1.0, 1.0, 1e-10);
    CHECK(std::abs(total - 1.0) <= 1e-8);
    Rng rng(6);
    for (int i = 0; i < 100; ++i) {
      const double w = rng.uniform(0.0, 1.0);
      CHECK(d.g(w) == doctest::Approx(d.g(-w)).epsilon(1e-14));
    }
  }
}

TEST_CASE("empty design support is an error") {
  DesignSpec d;
  d.kind = DesignKind::UniformZoom;
  d.center = -0.5;  // support entirely below 0 after clipping
  d.halfwidth = 0.2;
  CHECK_THROWS_WITH_AS(d.support(), "empty design support", std::invalid_argument);
}

TEST_CASE("second_stage_interval arithmetic and clipping") {
  const Interval a = second_stage_interval(0.5, 1.0, 0.5, 100);
  CHECK(a.lo == doctest::Approx(0.4));
  CHECK(a.hi == doctest::Approx(0.6));
  CHECK_FALSE(a.clipped);

  const Interval b = second_stage_interval(0.05, 1.0, 0.5, 100);
  CHECK(b.lo == 0.0);
  CHECK(b.hi == doctest::Approx(0.15));
  CHECK(b.clipped);

  const Interval c = second_stage_interval(0.5, 1.0, 0.5, 100, 0.1);
  CHECK(c.lo == doctest::Approx(0.41));
  CHECK(c.hi == doctest::Approx(0.59));
  CHECK_FALSE(c.clipped);

  CHECK_THROWS_AS(second_stage_interval(0.5, 0.1, 0.5, 100, 0.2), std::invalid_argument);
}

TEST_CASE("risk_uniform closed forms for the linear curve") {
  CurveSpec c;  // r(x) = x
  CHECK(risk_uniform(c, 0.5) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(risk_uniform(c, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(risk_uniform(c, 0.75) - risk_uniform(c, 0.5) == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(excess_risk(c, 0.75, 0.5) == doctest::Approx(0.0625).epsilon(1e-12));
}

TEST_CASE("risk_uniform quadrature agrees with the closed form") {
  CurveSpec c;
  c.family = CurveFamily::Logistic;
  c.steepness = 4.0;
  c.center = 0.5;
  for (double a : {0.1, 0.33, 0.5, 0.77, 1.0})
    CHECK(risk_uniform_quadrature(c, a) == doctest::Approx(risk_uniform(c, a)).epsilon(1e-9));
}

TEST_CASE("risk is minimized at the Bayes threshold") {
  CurveSpec c;
  c.family = CurveFamily::Logistic;
  c.steepness = 4.0;
  c.center = 0.5;
  const double d0 = c.inverse(0.5);
  const double rd0 = risk_uniform(c, d0);
  for (int i = 0; i <= 1000; ++i) {
    const double a = static_cast<double>(i) / 1000.0;
    CHECK(risk_uniform(c, a) >= rd0 - 1e-12);
  }
  // first-order condition at d0
  const double eps = 1e-5;
  const double fd = (risk_uniform(c, d0 + eps) - risk_uniform(c, d0 - eps)) / (2.0 * eps);
  CHECK(std::abs(fd) < 1e-6);
}

TEST_CASE("curve derivatives match central finite differences") {
  Rng rng(8);
  std::vector<CurveSpec> curves(4);
  curves[0].family = CurveFamily::Linear;
  curves[0].slope = 1.7;
  curves[0].intercept = -0.2;
  curves[1].family = CurveFamily::Logistic;
  curves[1].steepness = 3.0;
  curves[1].center = 0.4;
  curves[2].family = CurveFamily::ExpCusp;
  curves[2].rate = 1.3;
  curves[3].family = CurveFamily::QuadCap;
  curves[3].curv = 2.0;
  for (const auto& c : curves) {
    for (int i = 0; i < 50; ++i) {
      const double x = rng.uniform(0.05, 0.95);
      const double h = 1e-6;
      const double fd = (c.value(x + h) - c.value(x - h)) / (2.0 * h);
      const double d = c.deriv(x);
      const double denom = std::max(1.0, std::abs(d));
      CHECK(std::abs(fd - d) / denom <= 1e-6);
    }
  }
}

TEST_CASE("monotone curve inverses round-trip") {
  CurveSpec lin;
  lin.slope = 2.0;
  lin.intercept = -0.3;
  CHECK(lin.inverse(lin.value(0.4)) == doctest::Approx(0.4).epsilon(1e-12));
  CurveSpec lo;
  lo.family = CurveFamily::Logistic;
  lo.steepness = 5.0;
  lo.center = 0.6;
  CHECK(lo.inverse(lo.value(0.25)) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("uniform noise variant keeps the variance") {
  ModelSpec m = default_model(Problem::InverseIsotonic);
  m.noise = NoiseKind::Uniform;
  m.sigma = 0.2;
  DesignSpec d;
  d.kind = DesignKind::UniformGlobal;
  Rng rng(11);
  const SampleBatch b = sample_batch(m, d, 40000, 1000, rng);
  Eigen::ArrayXd resid(b.y.size());
  for (Eigen::Index i = 0; i < b.y.size(); ++i) resid[i] = b.y[i] - eval_mean(m, b.x[i], 1000);
  CHECK(std::abs(std::sqrt(variance(resid)) - 0.2) < 0.005);
  CHECK(resid.abs().maxCoeff() <= 0.2 * std::sqrt(3.0) + 1e-12);
}

TEST_CASE("asymmetric unimodal signal") {
  ModelSpec m = default_model(Problem::Mode);
  m.d0 = 0.5;
  m.asym = std::make_pair(2.0, 1.0);
  CHECK(eval_mean(m, 0.4, 10) == doctest::Approx(std::exp(-0.2)));
  CHECK(eval_mean(m, 0.6, 10) == doctest::Approx(std::exp(-0.1)));
}
