#include "adiabat/config.hpp"

#include <fstream>

#include "adiabat/errors.hpp"

namespace adiabat {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError(std::string("config: missing numeric field '") + key +
                      "'");
  return j[key].get<double>();
}

std::string require_string(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw ConfigError(std::string("config: missing string field '") + key +
                      "'");
  return j[key].get<std::string>();
}

}  // namespace

ModelConfig ModelConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  ModelConfig cfg = from_json(j);
  if (cfg.name.empty()) {
    // default the name to the file stem
    auto slash = path.find_last_of("/\\");
    std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = stem.rfind('.');
    if (dot != std::string::npos) stem = stem.substr(0, dot);
    cfg.name = stem;
  }
  return cfg;
}

ModelConfig ModelConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  ModelConfig cfg;

  if (j.contains("name")) cfg.name = require_string(j, "name");
  cfg.mode = require_string(j, "mode");
  if (cfg.mode != "calibrated" && cfg.mode != "uncalibrated")
    throw ConfigError("config: mode must be 'calibrated' or 'uncalibrated'");
  cfg.f_expr = require_string(j, "f");

  if (j.contains("functions")) {
    const json& fns = j["functions"];
    if (!fns.is_object())
      throw ConfigError("config: 'functions' must be an object");
    for (auto it = fns.begin(); it != fns.end(); ++it) {
      if (!it.value().is_string())
        throw ConfigError("config: function '" + it.key() +
                          "' body must be a string");
      cfg.functions[it.key()] = it.value().get<std::string>();
    }
  }

  if (!j.contains("domain") || !j["domain"].is_object())
    throw ConfigError("config: missing 'domain' object");
  const json& d = j["domain"];
  cfg.domain.x_min = require_number(d, "x_min");
  cfg.domain.x_max = require_number(d, "x_max");
  cfg.domain.y_min = require_number(d, "y_min");
  cfg.domain.y_max = require_number(d, "y_max");
  if (!(cfg.domain.x_min < cfg.domain.x_max) ||
      !(cfg.domain.y_min < cfg.domain.y_max))
    throw ConfigError("config: domain must have positive area");

  if (j.contains("orientation")) {
    cfg.orientation = require_string(j, "orientation");
    if (cfg.orientation != "y-solve" && cfg.orientation != "x-solve")
      throw ConfigError("config: orientation must be 'y-solve' or 'x-solve'");
  }

  if (!j.contains("adiabats") || !j["adiabats"].is_array())
    throw ConfigError("config: missing 'adiabats' array");
  for (const json& a : j["adiabats"]) {
    AdiabatConfig ac;
    ac.type = require_string(a, "type");
    if (ac.type == "explicit" || ac.type == "implicit") {
      ac.expr = require_string(a, "expr");
      if (a.contains("x_range")) {
        const json& r = a["x_range"];
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() ||
            !r[1].is_number())
          throw ConfigError("config: adiabat x_range must be [lo, hi]");
        ac.x_range = {r[0].get<double>(), r[1].get<double>()};
      }
    } else if (ac.type == "points") {
      if (!a.contains("points") || !a["points"].is_array())
        throw ConfigError("config: points adiabat needs a 'points' array");
      for (const json& p : a["points"]) {
        if (!p.is_array() || p.size() != 2)
          throw ConfigError("config: each point must be [x, y]");
        ac.points.push_back({p[0].get<double>(), p[1].get<double>()});
      }
    } else {
      throw ConfigError("config: adiabat type must be explicit, implicit or "
                        "points, got '" + ac.type + "'");
    }
    cfg.adiabats.push_back(std::move(ac));
  }

  const std::size_t expected = cfg.mode == "calibrated" ? 1 : 2;
  if (cfg.adiabats.size() != expected)
    throw ConfigError("config: mode '" + cfg.mode + "' requires exactly " +
                      std::to_string(expected) + " adiabat(s), got " +
                      std::to_string(cfg.adiabats.size()));

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (t.contains("root_tol")) cfg.root_tol = require_number(t, "root_tol");
    if (t.contains("quad_tol")) cfg.quad_tol = require_number(t, "quad_tol");
  }
  if (!(cfg.root_tol > 0.0) || !(cfg.quad_tol > 0.0))
    throw ConfigError("config: tolerances must be positive");

  if (j.contains("anchor")) cfg.anchor = require_number(j, "anchor");

  if (j.contains("samples")) {
    cfg.samples = static_cast<int>(require_number(j, "samples"));
    if (cfg.samples < 4) throw ConfigError("config: samples must be >= 4");
  }

  if (j.contains("grid")) {
    const json& g = j["grid"];
    cfg.grid_nx = static_cast<int>(require_number(g, "nx"));
    cfg.grid_ny = static_cast<int>(require_number(g, "ny"));
    if (cfg.grid_nx < 2 || cfg.grid_ny < 2)
      throw ConfigError("config: grid must be at least 2x2");
  }

  if (j.contains("levels")) {
    if (!j["levels"].is_array())
      throw ConfigError("config: 'levels' must be an array");
    cfg.levels.clear();
    for (const json& v : j["levels"]) {
      if (!v.is_number()) throw ConfigError("config: levels must be numbers");
      cfg.levels.push_back(v.get<double>());
    }
  }

  if (j.contains("check")) {
    const json& c = j["check"];
    if (c.contains("points"))
      cfg.check.points = static_cast<int>(require_number(c, "points"));
    if (c.contains("jacobian_tol"))
      cfg.check.jacobian_tol = require_number(c, "jacobian_tol");
    if (c.contains("roundtrip_tol"))
      cfg.check.roundtrip_tol = require_number(c, "roundtrip_tol");
    if (c.contains("stencil_h"))
      cfg.check.stencil_h = require_number(c, "stencil_h");
    if (c.contains("seed"))
      cfg.check.seed = static_cast<unsigned>(require_number(c, "seed"));
    if (cfg.check.points < 1)
      throw ConfigError("config: check.points must be >= 1");
  }

  return cfg;
}

ordered_json ModelConfig::echo() const {
  ordered_json out;
  out["name"] = name;
  out["mode"] = mode;
  out["f"] = f_expr;
  ordered_json fns = ordered_json::object();
  for (const auto& [k, v] : functions) fns[k] = v;
  out["functions"] = fns;
  out["domain"] = {{"x_min", domain.x_min},
                   {"x_max", domain.x_max},
                   {"y_min", domain.y_min},
                   {"y_max", domain.y_max}};
  out["orientation"] = orientation;
  ordered_json ads = ordered_json::array();
  for (const auto& a : adiabats) {
    ordered_json aj;
    aj["type"] = a.type;
    if (a.type == "points") {
      ordered_json pts = ordered_json::array();
      for (const Point& p : a.points) pts.push_back({p.x, p.y});
      aj["points"] = pts;
    } else {
      aj["expr"] = a.expr;
      if (a.x_range)
        aj["x_range"] = {a.x_range->first, a.x_range->second};
    }
    ads.push_back(aj);
  }
  out["adiabats"] = ads;
  out["tolerances"] = {{"root_tol", root_tol}, {"quad_tol", quad_tol}};
  const double default_anchor =
      orientation == "x-solve" ? domain.y_min : domain.x_min;
  out["anchor"] = anchor ? *anchor : default_anchor;  // materialized default
  out["samples"] = samples;
  out["grid"] = {{"nx", grid_nx}, {"ny", grid_ny}};
  out["levels"] = levels;
  out["check"] = {{"points", check.points},
                  {"jacobian_tol", check.jacobian_tol},
                  {"roundtrip_tol", check.roundtrip_tol},
                  {"stencil_h", check.stencil_h},
                  {"seed", check.seed}};
  return out;
}

FunctionRegistry ModelConfig::build_registry() const {
  FunctionRegistry reg;
  for (const auto& [fname, body] : functions) reg.define(fname, body);
  return reg;
}

std::shared_ptr<TransformContext> ModelConfig::build_context(
    const FunctionRegistry& registry) const {
  TransformSettings s;
  s.root_tol = root_tol;
  s.quad_tol = quad_tol;
  if (anchor) s.anchor = *anchor;
  s.orientation = orientation == "x-solve" ? Orientation::SolveForX
                                           : Orientation::SolveForY;
  Expression f = Expression::parse(f_expr, registry);
  return std::make_shared<TransformContext>(std::move(f), domain, s);
}

CurveSpec ModelConfig::build_adiabat(std::size_t index,
                                     const FunctionRegistry& registry) const {
  const AdiabatConfig& a = adiabats.at(index);
  if (a.type == "implicit")
    return CurveSpec::implicit(Expression::parse(a.expr, registry));
  if (a.type == "explicit") {
    Expression h = Expression::parse(a.expr, registry);
    if (a.x_range)
      return CurveSpec::explicit_graph(std::move(h), a.x_range->first,
                                       a.x_range->second);
    return CurveSpec::explicit_graph(std::move(h));
  }
  return CurveSpec::points(a.points);
}

}  // namespace adiabat
