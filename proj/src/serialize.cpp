#include "mstage/serialize.hpp"

#include <set>

namespace mstage {

void require_known_keys(const json& j, std::initializer_list<const char*> allowed,
                        const std::string& path) {
  if (!j.is_object()) throw config_error("expected an object at " + path);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!ok.count(item.key())) throw config_error("unknown field at " + path + "." + item.key());
  }
}

namespace {

template <typename T>
T get_field(const json& j, const char* key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw config_error("bad value at " + path + "." + key);
  }
}

}  // namespace

json to_json(const CurveSpec& c) {
  json j;
  j["family"] = curve_family_name(c.family);
  switch (c.family) {
    case CurveFamily::Linear:
      j["slope"] = c.slope;
      j["intercept"] = c.intercept;
      break;
    case CurveFamily::Logistic:
      j["steepness"] = c.steepness;
      j["center"] = c.center;
      break;
    case CurveFamily::ExpCusp:
      j["rate"] = c.rate;
      break;
    case CurveFamily::QuadCap:
      j["curv"] = c.curv;
      break;
  }
  return j;
}

CurveSpec curve_from_json(const json& j, const std::string& path, CurveSpec base) {
  require_known_keys(j, {"family", "slope", "intercept", "steepness", "center", "rate", "curv"},
                     path);
  CurveSpec c = base;
  if (j.contains("family")) {
    try {
      c.family = curve_family_from_name(j.at("family").get<std::string>());
    } catch (const std::exception&) {
      throw config_error("bad value at " + path + ".family");
    }
  }
  c.slope = get_field(j, "slope", path, c.slope);
  c.intercept = get_field(j, "intercept", path, c.intercept);
  c.steepness = get_field(j, "steepness", path, c.steepness);
  c.center = get_field(j, "center", path, c.center);
  c.rate = get_field(j, "rate", path, c.rate);
  c.curv = get_field(j, "curv", path, c.curv);
  return c;
}

namespace {

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::ChangePoint: return "ChangePoint";
    case ModelKind::Monotone: return "Monotone";
    case ModelKind::BinaryMonotone: return "BinaryMonotone";
    case ModelKind::Unimodal: return "Unimodal";
  }
  return "?";
}

ModelKind model_kind_from_name(const std::string& s, const std::string& path) {
  if (s == "ChangePoint") return ModelKind::ChangePoint;
  if (s == "Monotone") return ModelKind::Monotone;
  if (s == "BinaryMonotone") return ModelKind::BinaryMonotone;
  if (s == "Unimodal") return ModelKind::Unimodal;
  throw config_error("bad value at " + path + ".kind");
}

}  // namespace

json to_json(const ModelSpec& m) {
  json j;
  j["kind"] = model_kind_name(m.kind);
  j["d0"] = m.d0;
  j["sigma"] = m.sigma;
  j["alpha_base"] = m.alpha_base;
  j["c0"] = m.c0;
  j["xi"] = m.xi;
  j["curve"] = to_json(m.curve);
  j["t0"] = m.t0;
  if (m.asym) j["asym"] = json::array({m.asym->first, m.asym->second});
  j["noise"] = m.noise == NoiseKind::Gaussian ? "gaussian" : "uniform";
  return j;
}

ModelSpec model_from_json(const json& j, const std::string& path, ModelSpec base) {
  require_known_keys(
      j, {"kind", "d0", "sigma", "alpha_base", "c0", "xi", "curve", "t0", "asym", "noise"}, path);
  ModelSpec m = base;
  if (j.contains("kind"))
    m.kind = model_kind_from_name(j.at("kind").get<std::string>(), path);
  m.d0 = get_field(j, "d0", path, m.d0);
  m.sigma = get_field(j, "sigma", path, m.sigma);
  m.alpha_base = get_field(j, "alpha_base", path, m.alpha_base);
  m.c0 = get_field(j, "c0", path, m.c0);
  m.xi = get_field(j, "xi", path, m.xi);
  if (j.contains("curve")) m.curve = curve_from_json(j.at("curve"), path + ".curve", m.curve);
  m.t0 = get_field(j, "t0", path, m.t0);
  if (j.contains("asym")) {
    const auto& a = j.at("asym");
    if (!a.is_array() || a.size() != 2) throw config_error("bad value at " + path + ".asym");
    m.asym = std::make_pair(a[0].get<double>(), a[1].get<double>());
  }
  if (j.contains("noise")) {
    const auto s = j.at("noise").get<std::string>();
    if (s == "gaussian") m.noise = NoiseKind::Gaussian;
    else if (s == "uniform") m.noise = NoiseKind::Uniform;
    else throw config_error("bad value at " + path + ".noise");
  }
  return m;
}

namespace {

const char* density_name(DensityKind d) {
  return d == DensityKind::Triangular ? "triangular" : "trunc_exp";
}

DensityKind density_from_name(const std::string& s, const std::string& path) {
  if (s == "triangular") return DensityKind::Triangular;
  if (s == "trunc_exp") return DensityKind::TruncExp;
  throw config_error("bad value at " + path + ".density");
}

}  // namespace

json to_json(const DesignSpec& d) {
  json j;
  switch (d.kind) {
    case DesignKind::UniformGlobal:
      j["type"] = "uniform_global";
      j["a"] = d.a;
      j["b"] = d.b;
      break;
    case DesignKind::UniformZoom:
      j["type"] = "uniform_zoom";
      j["center"] = d.center;
      j["halfwidth"] = d.halfwidth;
      break;
    case DesignKind::SymmetricZoom:
      j["type"] = "symmetric_zoom";
      j["center"] = d.center;
      j["halfwidth"] = d.halfwidth;
      j["density"] = density_name(d.density);
      j["density_rate"] = d.density_rate;
      break;
  }
  return j;
}

DesignSpec design_from_json(const json& j, const std::string& path, DesignSpec base) {
  require_known_keys(j, {"type", "a", "b", "center", "halfwidth", "density", "density_rate"},
                     path);
  DesignSpec d = base;
  if (j.contains("type")) {
    const auto s = j.at("type").get<std::string>();
    if (s == "uniform_global") d.kind = DesignKind::UniformGlobal;
    else if (s == "uniform_zoom") d.kind = DesignKind::UniformZoom;
    else if (s == "symmetric_zoom") d.kind = DesignKind::SymmetricZoom;
    else throw config_error("bad value at " + path + ".type");
  }
  d.a = get_field(j, "a", path, d.a);
  d.b = get_field(j, "b", path, d.b);
  d.center = get_field(j, "center", path, d.center);
  d.halfwidth = get_field(j, "halfwidth", path, d.halfwidth);
  if (j.contains("density"))
    d.density = density_from_name(j.at("density").get<std::string>(), path);
  d.density_rate = get_field(j, "density_rate", path, d.density_rate);
  return d;
}

std::string problem_name(Problem p) {
  switch (p) {
    case Problem::ChangePoint: return "changepoint";
    case Problem::InverseIsotonic: return "inverse_isotonic";
    case Problem::Classification: return "classification";
    case Problem::Mode: return "mode";
  }
  return "?";
}

Problem problem_from_name(const std::string& s, const std::string& path) {
  if (s == "changepoint") return Problem::ChangePoint;
  if (s == "inverse_isotonic") return Problem::InverseIsotonic;
  if (s == "classification") return Problem::Classification;
  if (s == "mode") return Problem::Mode;
  throw config_error("bad value at " + path);
}

json to_json(const TwoStageConfig& c) {
  json j;
  j["problem"] = problem_name(c.problem);
  j["n"] = c.n;
  j["p"] = c.p;
  j["gamma"] = c.gamma;
  j["K"] = c.K;
  j["b"] = c.b;
  j["seed"] = c.seed;
  json d;
  d["type"] = c.second_stage_design == StageTwoDesign::Uniform ? "uniform" : "symmetric";
  if (c.second_stage_design == StageTwoDesign::Symmetric) {
    d["density"] = density_name(c.density);
    d["density_rate"] = c.density_rate;
  }
  j["second_stage_design"] = d;
  return j;
}

TwoStageConfig two_stage_from_json(const json& j, const std::string& path, TwoStageConfig base) {
  require_known_keys(j, {"problem", "n", "p", "gamma", "K", "b", "seed", "second_stage_design"},
                     path);
  TwoStageConfig c = base;
  if (j.contains("problem"))
    c.problem = problem_from_name(j.at("problem").get<std::string>(), path + ".problem");
  c.n = get_field<long>(j, "n", path, c.n);
  c.p = get_field(j, "p", path, c.p);
  c.gamma = get_field(j, "gamma", path, c.gamma);
  c.K = get_field(j, "K", path, c.K);
  c.b = get_field(j, "b", path, c.b);
  c.seed = get_field<std::uint64_t>(j, "seed", path, c.seed);
  if (j.contains("second_stage_design")) {
    const auto& d = j.at("second_stage_design");
    const std::string dpath = path + ".second_stage_design";
    require_known_keys(d, {"type", "density", "density_rate"}, dpath);
    if (d.contains("type")) {
      const auto s = d.at("type").get<std::string>();
      if (s == "uniform") c.second_stage_design = StageTwoDesign::Uniform;
      else if (s == "symmetric") c.second_stage_design = StageTwoDesign::Symmetric;
      else throw config_error("bad value at " + dpath + ".type");
    }
    if (d.contains("density"))
      c.density = density_from_name(d.at("density").get<std::string>(), dpath);
    c.density_rate = get_field(d, "density_rate", dpath, c.density_rate);
  }
  return c;
}

json to_json(const StepFunction& f) {
  json j;
  j["knots"] = std::vector<double>(f.knots.data(), f.knots.data() + f.knots.size());
  j["levels"] = std::vector<double>(f.levels.data(), f.levels.data() + f.levels.size());
  j["domain"] = json::array({f.lo, f.hi});
  return j;
}

StepFunction step_from_json(const json& j, const std::string& path) {
  require_known_keys(j, {"knots", "levels", "domain"}, path);
  StepFunction f;
  try {
    const auto knots = j.at("knots").get<std::vector<double>>();
    const auto levels = j.at("levels").get<std::vector<double>>();
    f.knots = Eigen::Map<const Eigen::ArrayXd>(knots.data(), static_cast<Eigen::Index>(knots.size()));
    f.levels =
        Eigen::Map<const Eigen::ArrayXd>(levels.data(), static_cast<Eigen::Index>(levels.size()));
    f.lo = j.at("domain").at(0).get<double>();
    f.hi = j.at("domain").at(1).get<double>();
  } catch (const json::exception&) {
    throw config_error("bad step function at " + path);
  }
  if (f.levels.size() != f.knots.size() + 1)
    throw config_error("bad step function at " + path + ": need levels = knots + 1");
  for (Eigen::Index i = 1; i < f.knots.size(); ++i)
    if (!(f.knots[i] > f.knots[i - 1]))
      throw config_error("bad step function at " + path + ": knots must increase");
  return f;
}

}  // namespace mstage
