#include "mstage/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mstage {

void ModelSpec::validate() const {
  if (!(d0 > 0.0 && d0 < 1.0)) throw std::invalid_argument("model: d0 must lie in (0,1)");
  if (!(sigma >= 0.0)) throw std::invalid_argument("model: sigma must be >= 0");
  if (kind == ModelKind::ChangePoint) {
    if (!(c0 > 0.0)) throw std::invalid_argument("model: c0 must be > 0");
    if (!(xi >= 0.0 && xi < 0.5)) throw std::invalid_argument("model: xi must lie in [0, 1/2)");
  }
  if (kind == ModelKind::Monotone || kind == ModelKind::BinaryMonotone) {
    if (!curve.monotone()) throw std::invalid_argument("model: curve must be monotone");
    if (curve.deriv(0.5) < 0.0) throw std::invalid_argument("model: curve must be nondecreasing");
  }
  if (kind == ModelKind::Unimodal && asym) {
    if (!(asym->first > 0.0 && asym->second > 0.0))
      throw std::invalid_argument("model: asym rates must be > 0");
  }
}

double eval_mean(const ModelSpec& model, double x, long n_budget) {
  switch (model.kind) {
    case ModelKind::ChangePoint: {
      const double gap = model.c0 * std::pow(static_cast<double>(n_budget), -model.xi);
      return model.alpha_base + (x > model.d0 ? gap : 0.0);
    }
    case ModelKind::Monotone:
    case ModelKind::BinaryMonotone:
      return model.curve.value(x);
    case ModelKind::Unimodal:
      if (model.asym) {
        const double t = x - model.d0;
        return t <= 0.0 ? std::exp(model.asym->first * t) : std::exp(-model.asym->second * t);
      }
      return model.curve.value(std::abs(x - model.d0));
  }
  throw std::logic_error("unreachable");
}

DesignSpec::Support DesignSpec::support() const {
  Support s;
  switch (kind) {
    case DesignKind::UniformGlobal:
      s.lo = a;
      s.hi = b;
      break;
    case DesignKind::UniformZoom:
    case DesignKind::SymmetricZoom:
      s.lo = center - halfwidth;
      s.hi = center + halfwidth;
      break;
  }
  const double lo = std::max(s.lo, 0.0);
  const double hi = std::min(s.hi, 1.0);
  s.clipped = (lo > s.lo) || (hi < s.hi);
  s.lo = lo;
  s.hi = hi;
  if (!(s.lo < s.hi)) throw std::invalid_argument("empty design support");
  return s;
}

double DesignSpec::g(double w) const {
  if (std::abs(w) > 1.0) return 0.0;
  switch (density) {
    case DensityKind::Triangular:
      return 1.0 - std::abs(w);
    case DensityKind::TruncExp: {
      const double c = density_rate / (2.0 * (1.0 - std::exp(-density_rate)));
      return c * std::exp(-density_rate * std::abs(w));
    }
  }
  throw std::logic_error("unreachable");
}

double DesignSpec::density_at0() const {
  switch (kind) {
    case DesignKind::UniformGlobal:
    case DesignKind::UniformZoom:
      return 0.5;  // uniform on [-1,1] in scaled units
    case DesignKind::SymmetricZoom:
      return g(0.0);
  }
  throw std::logic_error("unreachable");
}

namespace {

// CDF of the symmetric density g on [-1,1]
double symmetric_cdf(const DesignSpec& d, double w) {
  if (w <= -1.0) return 0.0;
  if (w >= 1.0) return 1.0;
  switch (d.density) {
    case DensityKind::Triangular:
      return w < 0.0 ? 0.5 * (1.0 + w) * (1.0 + w) : 1.0 - 0.5 * (1.0 - w) * (1.0 - w);
    case DensityKind::TruncExp: {
      const double r = d.density_rate;
      const double c = r / (2.0 * (1.0 - std::exp(-r)));
      if (w < 0.0) return (c / r) * (std::exp(r * w) - std::exp(-r));
      return 0.5 + (c / r) * (1.0 - std::exp(-r * w));
    }
  }
  throw std::logic_error("unreachable");
}

double symmetric_inv_cdf(const DesignSpec& d, double u) {
  switch (d.density) {
    case DensityKind::Triangular:
      return u < 0.5 ? std::sqrt(2.0 * u) - 1.0 : 1.0 - std::sqrt(2.0 * (1.0 - u));
    case DensityKind::TruncExp: {
      const double r = d.density_rate;
      const double c = r / (2.0 * (1.0 - std::exp(-r)));
      if (u < 0.5) return std::log(u * r / c + std::exp(-r)) / r;
      return -std::log(1.0 - (u - 0.5) * r / c) / r;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

double DesignSpec::sample(Rng& rng) const {
  const Support s = support();
  const double u = rng.uniform01();
  switch (kind) {
    case DesignKind::UniformGlobal:
    case DesignKind::UniformZoom:
      return s.lo + (s.hi - s.lo) * u;
    case DesignKind::SymmetricZoom: {
      // inverse CDF restricted to the clipped w-range
      const double wlo = (s.lo - center) / halfwidth;
      const double whi = (s.hi - center) / halfwidth;
      const double ulo = symmetric_cdf(*this, wlo);
      const double uhi = symmetric_cdf(*this, whi);
      const double w = symmetric_inv_cdf(*this, ulo + u * (uhi - ulo));
      return std::min(s.hi, std::max(s.lo, center + w * halfwidth));
    }
  }
  throw std::logic_error("unreachable");
}

SampleBatch sample_batch(const ModelSpec& model, const DesignSpec& design, long count,
                         long n_budget, Rng& rng) {
  if (count < 1) throw std::invalid_argument("sample_batch: count must be >= 1");
  design.support();  // throws on empty support
  SampleBatch batch;
  batch.x.resize(count);
  batch.y.resize(count);
  batch.design = design;
  batch.n_budget = n_budget;
  const double half = std::sqrt(3.0) * model.sigma;  // uniform noise with variance sigma^2
  for (long i = 0; i < count; ++i) {
    const double x = design.sample(rng);
    const double m = eval_mean(model, x, n_budget);
    double y;
    if (model.kind == ModelKind::BinaryMonotone) {
      y = rng.bernoulli(m) ? 1.0 : 0.0;
    } else if (model.noise == NoiseKind::Gaussian) {
      y = m + model.sigma * rng.normal();
    } else {
      y = m + rng.uniform(-half, half);
    }
    batch.x[i] = x;
    batch.y[i] = y;
  }
  return batch;
}

Interval second_stage_interval(double d1_hat, double K, double gamma, long n1,
                               std::optional<double> shrink_by_b) {
  if (!(K > 0.0) || !(gamma > 0.0) || n1 < 1)
    throw std::invalid_argument("second_stage_interval: need K > 0, gamma > 0, n1 >= 1");
  double scale = K;
  if (shrink_by_b) {
    if (!(*shrink_by_b < K)) throw std::invalid_argument("bin exceeds halfwidth");
    scale = K - *shrink_by_b;
  }
  const double h = scale * std::pow(static_cast<double>(n1), -gamma);
  Interval w;
  w.lo = std::max(0.0, d1_hat - h);
  w.hi = std::min(1.0, d1_hat + h);
  w.clipped = (d1_hat - h < 0.0) || (d1_hat + h > 1.0);
  return w;
}

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double abs_tol) {
  struct Impl {
    const std::function<double(double)>& f;
    double recurse(double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) const {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
      return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
             recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
  } impl{f};
  if (lo == hi) return 0.0;
  const double m = 0.5 * (lo + hi);
  const double fa = f(lo), fm = f(m), fb = f(hi);
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  return impl.recurse(lo, hi, fa, fm, fb, whole, abs_tol, 0);
}

double risk_uniform_quadrature(const CurveSpec& curve, double threshold) {
  const auto r = [&](double x) { return curve.value(x); };
  const double total = adaptive_simpson([&](double x) { return 1.0 - r(x); }, 0.0, 1.0, 1e-10);
  const double head = adaptive_simpson([&](double x) { return 2.0 * r(x) - 1.0; }, 0.0, threshold, 1e-10);
  return total + head;
}

double risk_uniform(const CurveSpec& curve, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw std::invalid_argument("risk_uniform: threshold must lie in [0,1]");
  if (curve.family == CurveFamily::Linear || curve.family == CurveFamily::Logistic) {
    const auto A = [&](double x) { return curve.antideriv(x); };
    const double total = 1.0 - (A(1.0) - A(0.0));
    const double head = 2.0 * (A(threshold) - A(0.0)) - threshold;
    return total + head;
  }
  return risk_uniform_quadrature(curve, threshold);
}

double excess_risk(const CurveSpec& curve, double a, double d0) {
  switch (curve.family) {
    case CurveFamily::Linear: {
      const double rd0 = curve.value(d0);
      return curve.slope * (a - d0) * (a - d0) + (2.0 * rd0 - 1.0) * (a - d0);
    }
    case CurveFamily::Logistic: {
      // integral of tanh(s(x-c)/2) from d0 to a
      const auto lncosh = [&](double x) {
        const double z = std::abs(x);
        return z + std::log1p(std::exp(-2.0 * z)) - std::numbers::ln2;
      };
      const double s = curve.steepness;
      return (2.0 / s) * (lncosh(0.5 * s * (a - curve.center)) - lncosh(0.5 * s * (d0 - curve.center)));
    }
    default:
      return adaptive_simpson([&](double x) { return 2.0 * curve.value(x) - 1.0; }, d0, a, 1e-12);
  }
}

}  // namespace mstage
