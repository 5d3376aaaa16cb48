#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "adiabat/calibrated.hpp"
#include "adiabat/expr.hpp"
#include "adiabat/geometry.hpp"
#include "adiabat/transform.hpp"

namespace adiabat {

/// One adiabat descriptor from a model config.
struct AdiabatConfig {
  std::string type;  // "explicit" | "implicit" | "points"
  std::string expr;
  std::optional<std::pair<double, double>> x_range;  // explicit only
  std::vector<Point> points;
};

struct CheckConfig {
  int points = 100;
  double jacobian_tol = 1e-5;
  double roundtrip_tol = 1e-7;
  double stencil_h = 1e-4;  // stencil width factor, times the domain scale
  unsigned seed = 20240809;
};

/// A model configuration: one self-describing JSON document per experiment.
struct ModelConfig {
  std::string name;
  std::string mode;  // "calibrated" | "uncalibrated"
  std::string f_expr;
  std::map<std::string, std::string> functions;
  DomainRect domain;
  std::string orientation = "y-solve";
  std::vector<AdiabatConfig> adiabats;
  double root_tol = 1e-12;
  double quad_tol = 1e-10;
  std::optional<double> anchor;
  int samples = 129;
  int grid_nx = 48;
  int grid_ny = 48;
  std::vector<double> levels{0.0};
  CheckConfig check;

  static ModelConfig load(const std::string& path);
  static ModelConfig from_json(const nlohmann::json& j);

  /// Every effective parameter with defaults materialized, for report.json.
  nlohmann::ordered_json echo() const;

  FunctionRegistry build_registry() const;
  std::shared_ptr<TransformContext> build_context(
      const FunctionRegistry& registry) const;
  CurveSpec build_adiabat(std::size_t index,
                          const FunctionRegistry& registry) const;
};

}  // namespace adiabat
