#include "mstage/two_stage.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mstage {

ModelKind model_kind_for(Problem problem) {
  switch (problem) {
    case Problem::ChangePoint: return ModelKind::ChangePoint;
    case Problem::InverseIsotonic: return ModelKind::Monotone;
    case Problem::Classification: return ModelKind::BinaryMonotone;
    case Problem::Mode: return ModelKind::Unimodal;
  }
  throw std::logic_error("unreachable");
}

double true_threshold(const ModelSpec& model) {
  switch (model.kind) {
    case ModelKind::Monotone: return model.curve.inverse(model.t0);
    case ModelKind::BinaryMonotone: return model.curve.inverse(0.5);
    default: return model.d0;
  }
}

void TwoStageConfig::validate_gates(const ModelSpec& model) const {
  if (model.kind != model_kind_for(problem))
    throw std::invalid_argument("two_stage: model kind does not match cfg.problem");
  if (!(n >= 4)) throw std::invalid_argument("two_stage: n too small");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("two_stage: p must lie in (0,1)");
  if (!(K > 0.0)) throw std::invalid_argument("two_stage: K must be > 0");
  switch (problem) {
    case Problem::ChangePoint:
      if (!(gamma > 0.0 && gamma < 1.0 - 2.0 * model.xi)) {
        std::ostringstream os;
        os << "gamma < 1-2*xi violated (gamma=" << gamma << ", xi=" << model.xi << ")";
        throw gate_error(os.str());
      }
      break;
    case Problem::InverseIsotonic:
    case Problem::Classification:
      if (!(gamma > 0.0 && gamma < 1.0 / 3.0)) {
        std::ostringstream os;
        os << "gamma < 1/3 violated (gamma=" << gamma << ")";
        throw gate_error(os.str());
      }
      break;
    case Problem::Mode:
      if (!(gamma > 0.0 && gamma < 1.0 / 3.0)) {
        std::ostringstream os;
        os << "gamma < 1/3 violated (gamma=" << gamma << ")";
        throw gate_error(os.str());
      }
      if (!(K > b && b > 0.0)) throw gate_error("bin exceeds halfwidth (need K > b > 0)");
      break;
  }
}

namespace {

struct StageOneResult {
  double d1 = 0.0;
  std::optional<double> alpha, beta;
};

StageOneResult stage_one_estimate(const ModelSpec& model, const SampleBatch& batch,
                                  double shorth_bin) {
  StageOneResult r;
  switch (model.kind) {
    case ModelKind::ChangePoint: {
      const SplitFit f = fit_changepoint_joint(batch);
      r.d1 = f.d_hat;
      r.alpha = f.alpha_hat;
      r.beta = f.beta_hat;
      break;
    }
    case ModelKind::Monotone:
    case ModelKind::BinaryMonotone: {
      const DesignSpec::Support s = batch.design.support();
      const StepFunction fit = isotonic_fit(batch, s.lo, s.hi);
      const double t0 = model.kind == ModelKind::BinaryMonotone ? 0.5 : model.t0;
      r.d1 = isotonic_inverse(fit, t0);
      break;
    }
    case ModelKind::Unimodal: {
      const DesignSpec::Support s = batch.design.support();
      const Interval search{s.lo + shorth_bin, s.hi - shorth_bin, false};
      if (!(search.lo < search.hi)) throw std::invalid_argument("shorth: bin exceeds design support");
      r.d1 = shorth_mode(batch, shorth_bin, search).d_hat;
      break;
    }
  }
  return r;
}

}  // namespace

EstimateRecord run_two_stage(const ModelSpec& model, const TwoStageConfig& cfg, Rng& rng,
                             std::optional<double> halfwidth_override) {
  const auto t_start = std::chrono::steady_clock::now();
  model.validate();
  if (halfwidth_override) {
    if (model.kind != model_kind_for(cfg.problem))
      throw std::invalid_argument("two_stage: model kind does not match cfg.problem");
    if (!(*halfwidth_override > 0.0))
      throw std::invalid_argument("two_stage: halfwidth override must be > 0");
    if (cfg.problem == Problem::Mode && !(cfg.K > cfg.b && cfg.b > 0.0))
      throw gate_error("bin exceeds halfwidth (need K > b > 0)");
  } else {
    cfg.validate_gates(model);
  }

  EstimateRecord rec;
  rec.n1 = std::lround(cfg.p * static_cast<double>(cfg.n));
  rec.n2 = cfg.n - rec.n1;
  if (rec.n1 < 2 || rec.n2 < 1) throw std::invalid_argument("two_stage: degenerate budget split");

  DesignSpec global;
  global.kind = DesignKind::UniformGlobal;
  global.a = 0.0;
  global.b = 1.0;
  const SampleBatch batch1 = sample_batch(model, global, rec.n1, cfg.n, rng);
  const StageOneResult s1 = stage_one_estimate(model, batch1, cfg.b);
  rec.d1_hat = s1.d1;
  rec.alpha_hat = s1.alpha;
  rec.beta_hat = s1.beta;

  const double H =
      halfwidth_override.value_or(cfg.K * std::pow(static_cast<double>(rec.n1), -cfg.gamma));

  // sampling interval [d1 -+ H] clipped to [0,1]
  Interval sample_window;
  sample_window.lo = std::max(0.0, rec.d1_hat - H);
  sample_window.hi = std::min(1.0, rec.d1_hat + H);
  sample_window.clipped = (rec.d1_hat - H < 0.0) || (rec.d1_hat + H > 1.0);

  DesignSpec design2;
  if (cfg.second_stage_design == StageTwoDesign::Uniform) {
    design2.kind = DesignKind::UniformZoom;
  } else {
    design2.kind = DesignKind::SymmetricZoom;
    design2.density = cfg.density;
    design2.density_rate = cfg.density_rate;
  }
  design2.center = rec.d1_hat;
  design2.halfwidth = H;

  SampleBatch batch2 = sample_batch(model, design2, rec.n2, cfg.n, rng);
  batch2.stage = 2;

  switch (cfg.problem) {
    case Problem::ChangePoint: {
      rec.window = sample_window;
      const WindowFit f = fit_changepoint_plugin(batch2, *rec.alpha_hat, *rec.beta_hat, rec.window);
      rec.d2_hat = f.d_hat;
      rec.vacuous_flag = f.vacuous;
      break;
    }
    case Problem::InverseIsotonic:
    case Problem::Classification: {
      rec.window = sample_window;
      const StepFunction fit = isotonic_fit(batch2, rec.window.lo, rec.window.hi);
      const double t0 = cfg.problem == Problem::Classification ? 0.5 : model.t0;
      rec.d2_hat = isotonic_inverse(fit, t0);
      break;
    }
    case Problem::Mode: {
      const double bin2 = (cfg.b / cfg.K) * H;  // b*n1^{-gamma} without override
      Interval search;
      search.lo = std::max(0.0, rec.d1_hat - (H - bin2));
      search.hi = std::min(1.0, rec.d1_hat + (H - bin2));
      search.clipped = (rec.d1_hat - (H - bin2) < 0.0) || (rec.d1_hat + (H - bin2) > 1.0);
      rec.window = search;
      rec.window.clipped = search.clipped || sample_window.clipped;
      const WindowFit f = shorth_mode(batch2, bin2, search);
      rec.d2_hat = f.d_hat;
      rec.vacuous_flag = f.vacuous;
      break;
    }
  }
  rec.clip_flag = rec.window.clipped || sample_window.clipped;
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
  return rec;
}

EstimateRecord run_one_stage(const ModelSpec& model, long n, const DesignSpec& design, Rng& rng,
                             double shorth_bin) {
  const auto t_start = std::chrono::steady_clock::now();
  if (n < 2) throw std::invalid_argument("one_stage: n must be >= 2");
  model.validate();
  EstimateRecord rec;
  rec.n1 = n;
  rec.n2 = 0;
  const SampleBatch batch = sample_batch(model, design, n, n, rng);
  const StageOneResult s1 = stage_one_estimate(model, batch, shorth_bin);
  rec.d1_hat = s1.d1;
  rec.d2_hat = s1.d1;
  rec.alpha_hat = s1.alpha;
  rec.beta_hat = s1.beta;
  const DesignSpec::Support s = design.support();
  rec.window = Interval{s.lo, s.hi, s.clipped};
  rec.clip_flag = s.clipped;
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
  return rec;
}

double practical_halfwidth(Problem problem, long n1, double tau, double limit_quantile,
                           double xi) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("practical_halfwidth: tau in (0,1)");
  if (!(limit_quantile > 0.0))
    throw std::invalid_argument("practical_halfwidth: limit_quantile must be > 0");
  if (n1 < 1) throw std::invalid_argument("practical_halfwidth: n1 must be >= 1");
  double rate = 1.0 / 3.0;
  if (problem == Problem::ChangePoint) {
    if (!(xi >= 0.0 && xi < 0.5)) throw std::invalid_argument("practical_halfwidth: bad xi");
    rate = 1.0 - 2.0 * xi;
  }
  return limit_quantile / std::pow(static_cast<double>(n1), rate);
}

}  // namespace mstage
