#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mstage {

// Parametric curve families. Monotone regression curves (Linear, Logistic)
// supply a closed-form inverse and antiderivative; the unimodal radial
// profiles (ExpCusp, QuadCap) are used as m(x) = profile(|x - d0|).
enum class CurveFamily { Linear, Logistic, ExpCusp, QuadCap };

struct CurveSpec {
  CurveFamily family = CurveFamily::Linear;
  // Linear: intercept + slope*x
  double slope = 1.0;
  double intercept = 0.0;
  // Logistic: 1 / (1 + exp(-steepness*(x - center)))
  double steepness = 4.0;
  double center = 0.5;
  // ExpCusp profile: exp(-rate*t), derivative -rate at 0+
  double rate = 1.0;
  // QuadCap profile: 1 - curv*t^2, derivative 0 at 0
  double curv = 1.0;

  double value(double x) const {
    switch (family) {
      case CurveFamily::Linear: return intercept + slope * x;
      case CurveFamily::Logistic: return 1.0 / (1.0 + std::exp(-steepness * (x - center)));
      case CurveFamily::ExpCusp: return std::exp(-rate * x);
      case CurveFamily::QuadCap: return 1.0 - curv * x * x;
    }
    throw std::logic_error("unreachable");
  }

  double deriv(double x) const {
    switch (family) {
      case CurveFamily::Linear: return slope;
      case CurveFamily::Logistic: {
        const double v = value(x);
        return steepness * v * (1.0 - v);
      }
      case CurveFamily::ExpCusp: return -rate * std::exp(-rate * x);
      case CurveFamily::QuadCap: return -2.0 * curv * x;
    }
    throw std::logic_error("unreachable");
  }

  bool monotone() const {
    return family == CurveFamily::Linear || family == CurveFamily::Logistic;
  }

  double inverse(double t) const {
    switch (family) {
      case CurveFamily::Linear:
        if (slope == 0.0) throw std::domain_error("linear curve with zero slope has no inverse");
        return (t - intercept) / slope;
      case CurveFamily::Logistic:
        if (!(t > 0.0 && t < 1.0)) throw std::domain_error("logistic inverse needs t in (0,1)");
        return center + std::log(t / (1.0 - t)) / steepness;
      default:
        throw std::domain_error("curve family has no inverse");
    }
  }

  // antiderivative of value(), fixed at A(0) (additive constant irrelevant)
  double antideriv(double x) const {
    switch (family) {
      case CurveFamily::Linear: return intercept * x + 0.5 * slope * x * x;
      case CurveFamily::Logistic:
        // (1/s) * log(1 + exp(s*(x-c))), written to avoid overflow
        {
          const double z = steepness * (x - center);
          const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
          return softplus / steepness;
        }
      case CurveFamily::ExpCusp: return -std::exp(-rate * x) / rate;
      case CurveFamily::QuadCap: return x - curv * x * x * x / 3.0;
    }
    throw std::logic_error("unreachable");
  }
};

inline std::string curve_family_name(CurveFamily f) {
  switch (f) {
    case CurveFamily::Linear: return "linear";
    case CurveFamily::Logistic: return "logistic";
    case CurveFamily::ExpCusp: return "exp_cusp";
    case CurveFamily::QuadCap: return "quad_cap";
  }
  return "?";
}

inline CurveFamily curve_family_from_name(const std::string& s) {
  if (s == "linear") return CurveFamily::Linear;
  if (s == "logistic") return CurveFamily::Logistic;
  if (s == "exp_cusp") return CurveFamily::ExpCusp;
  if (s == "quad_cap") return CurveFamily::QuadCap;
  throw std::invalid_argument("unknown curve family: " + s);
}

}  // namespace mstage
