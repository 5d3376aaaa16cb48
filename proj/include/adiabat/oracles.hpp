#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adiabat/calibrated.hpp"
#include "adiabat/expr.hpp"
#include "adiabat/geometry.hpp"
#include "adiabat/transform.hpp"

namespace adiabat::oracles {

/// A named reference model: equation of state, domain, adiabat(s), and an
/// optional closed-form entropy used by test oracles (any function that is
/// constant along the fixture's adiabats qualifies).
struct Fixture {
  std::string name;
  FunctionRegistry functions;
  Expression f;
  DomainRect domain;
  TransformSettings settings;
  std::vector<CurveSpec> adiabats;
  std::optional<Expression> entropy_closed_form;

  std::shared_ptr<TransformContext> make_context() const {
    return std::make_shared<TransformContext>(f, domain, settings);
  }
};

/// Ideal gas: f = x*y on [0.5,2]^2, anchor 1, one explicit adiabat
/// y = x^(-3/5) (adiabatic index 5/3), closed-form entropy
/// 1.5*ln(x*y^(5/3)).
Fixture ideal_gas_fixture();

/// Ideal gas with two implicit adiabats x*y^(5/3) = 1 and = e on the wider
/// domain [0.5,3] x [0.5,2.8], where their transformed ranges overlap.
Fixture ideal_gas_two_adiabats_fixture();

/// Calibrated gas with temperature-dependent adiabatic index
/// gamma(t) = 1 + 1/(1+t): f = phi(x*y) with phi(t) = t + t^2/2 (the
/// primitive of 1/(gamma-1)), one implicit adiabat x*y^gamma(x*y) = 1 through
/// (1,1) on [0.5,2]^2. The closed form x*y^gamma(x*y) is the empirical
/// entropy: constant on adiabats, a monotone relabel of the absolute one.
Fixture feynman_gas_fixture();

/// Miscalibrated ideal gas: isotherms labeled by f = x^2*y^2 instead of x*y,
/// with the two adiabats x*y^(5/3) = 1 and = e, on [0.4,4] x [0.42,3.2]
/// (wide enough in x for the transformed adiabats to overlap).
Fixture squared_calibration_fixture();

/// Closed-form ideal-gas entropy 1/(gamma-1) * ln(x y^gamma).
double ideal_gas_entropy(double gamma, double x, double y);

/// Independent brute-force adiabat oracle: integrates the level-curve ODE
/// dy/dx = -S_x/S_y of the fixture's closed-form entropy from `start`, over
/// x in [x_lo, x_hi], with adaptive step halving. Throws when the trace
/// leaves the fixture domain. A zero-length span yields the single start
/// point.
Polyline adiabat_ode_trace(const Fixture& fixture, Point start, double x_lo,
                           double x_hi);

using FieldFn = std::function<double(double, double)>;

/// Max over `pts` of the normalized cross product of the two numerical
/// gradients (central differences, stencil width h_scale * max(1,|x|,|y|)).
/// Zero means the fields share their family of level curves.
double gradient_parallelism(const FieldFn& a, const FieldFn& b,
                            const std::vector<Point>& pts,
                            double h_scale = 1e-4);

}  // namespace adiabat::oracles
