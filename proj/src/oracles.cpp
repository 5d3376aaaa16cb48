#include "adiabat/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "adiabat/errors.hpp"

namespace adiabat::oracles {

Fixture ideal_gas_fixture() {
  Fixture fx;
  fx.name = "ideal-gas";
  fx.f = Expression::parse("x*y");
  fx.domain = {0.5, 2.0, 0.5, 2.0};
  fx.settings.anchor = 1.0;
  fx.adiabats.push_back(
      CurveSpec::explicit_graph(Expression::parse("x^(-3/5)")));
  fx.entropy_closed_form = Expression::parse("1.5*ln(x*y^(5/3))");
  return fx;
}

Fixture ideal_gas_two_adiabats_fixture() {
  Fixture fx;
  fx.name = "ideal-gas-two-adiabats";
  fx.f = Expression::parse("x*y");
  fx.domain = {0.5, 3.0, 0.5, 2.8};
  fx.settings.anchor = 1.0;
  fx.adiabats.push_back(
      CurveSpec::implicit(Expression::parse("x*y^(5/3) - 1")));
  fx.adiabats.push_back(
      CurveSpec::implicit(Expression::parse("x*y^(5/3) - exp(1)")));
  fx.entropy_closed_form = Expression::parse("1.5*ln(x*y^(5/3))");
  return fx;
}

Fixture feynman_gas_fixture() {
  Fixture fx;
  fx.name = "feynman-gas";
  fx.functions.define("phi", "t + t^2/2", /*strictly_monotone=*/true);
  fx.functions.define("gamma", "1 + 1/(1+t)");
  fx.f = Expression::parse("phi(x*y)", fx.functions);
  fx.domain = {0.5, 2.0, 0.5, 2.0};
  fx.settings.anchor = 1.0;
  fx.adiabats.push_back(CurveSpec::implicit(
      Expression::parse("x*y^gamma(x*y) - 1", fx.functions)));
  fx.entropy_closed_form =
      Expression::parse("x*y^gamma(x*y)", fx.functions);
  return fx;
}

Fixture squared_calibration_fixture() {
  Fixture fx;
  fx.name = "miscalibrated-x2y2";
  fx.f = Expression::parse("x^2*y^2");
  fx.domain = {0.4, 4.0, 0.42, 3.2};
  fx.settings.anchor = 1.0;
  // f_y reaches ~100 near the far corner; tighter quadrature keeps the
  // round-trip inversion inside 1e-7
  fx.settings.root_tol = 1e-13;
  fx.settings.quad_tol = 1e-12;
  fx.adiabats.push_back(
      CurveSpec::implicit(Expression::parse("x*y^(5/3) - 1")));
  fx.adiabats.push_back(
      CurveSpec::implicit(Expression::parse("x*y^(5/3) - exp(1)")));
  fx.entropy_closed_form = Expression::parse("1.5*ln(x*y^(5/3))");
  return fx;
}

double ideal_gas_entropy(double gamma, double x, double y) {
  if (!(x > 0.0) || !(y > 0.0))
    throw DomainError("ideal_gas_entropy needs x, y > 0");
  if (gamma == 1.0) throw DomainError("ideal_gas_entropy needs gamma != 1");
  return (std::log(x) + gamma * std::log(y)) / (gamma - 1.0);
}

namespace {

struct LevelCurveOde {
  Expression s_x, s_y;

  double slope(double x, double y) const {
    const double sy = s_y.eval(x, y);
    if (sy == 0.0)
      throw CurveError("level-curve ODE has a vertical tangent at x=" +
                       std::to_string(x));
    return -s_x.eval(x, y) / sy;
  }

  double rk4_step(double x, double y, double h) const {
    const double k1 = slope(x, y);
    const double k2 = slope(x + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = slope(x + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = slope(x + h, y + h * k3);
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

// integrates from start.x to x_end (either direction), appending points
void trace_direction(const LevelCurveOde& ode, const DomainRect& dom,
                     Point start, double x_end, Polyline& out) {
  const double span = x_end - start.x;
  if (span == 0.0) return;
  const double dir = span > 0.0 ? 1.0 : -1.0;
  const double h_max = std::abs(span) / 64.0;  // keeps the polyline dense
  double h = dir * std::abs(span) / 256.0;
  double x = start.x;
  double y = start.y;
  const double x_stop = x_end;

  for (long steps = 0; steps < 2000000; ++steps) {
    if ((dir > 0.0 && x >= x_stop) || (dir < 0.0 && x <= x_stop)) return;
    if (dir > 0.0)
      h = std::min(h, x_stop - x);
    else
      h = std::max(h, x_stop - x);

    const double full = ode.rk4_step(x, y, h);
    const double mid = ode.rk4_step(x, y, 0.5 * h);
    const double half2 = ode.rk4_step(x + 0.5 * h, mid, 0.5 * h);
    const double err = std::abs(half2 - full);
    const double tol = 1e-12 * (1.0 + std::abs(y));
    if (err > tol && std::abs(h) > 1e-12) {
      h *= 0.5;
      continue;
    }
    x += h;
    y = half2 + (half2 - full) / 15.0;
    if (!dom.contains(x, y))
      throw CurveError("adiabat trace leaves the domain at x=" +
                       std::to_string(x) + ", y=" + std::to_string(y));
    out.push_back({x, y});
    if (err < 0.01 * tol) h = dir * std::min(2.0 * std::abs(h), h_max);
  }
  throw CurveError("adiabat trace did not finish within the step budget");
}

}  // namespace

Polyline adiabat_ode_trace(const Fixture& fixture, Point start, double x_lo,
                           double x_hi) {
  if (!fixture.entropy_closed_form)
    throw CurveError("fixture '" + fixture.name +
                     "' has no closed-form entropy to trace");
  if (!(x_lo <= x_hi)) std::swap(x_lo, x_hi);
  if (!fixture.domain.contains(start.x, start.y))
    throw DomainError("trace start lies outside the fixture domain");
  if (start.x < x_lo || start.x > x_hi)
    throw DomainError("trace start lies outside the requested span");

  const Expression& s = *fixture.entropy_closed_form;
  LevelCurveOde ode{s.derivative(Var::X), s.derivative(Var::Y)};

  if (x_lo == x_hi) return {start};

  Polyline left;
  trace_direction(ode, fixture.domain, start, x_lo, left);
  Polyline right;
  trace_direction(ode, fixture.domain, start, x_hi, right);

  Polyline out;
  out.reserve(left.size() + right.size() + 1);
  for (auto it = left.rbegin(); it != left.rend(); ++it) out.push_back(*it);
  out.push_back(start);
  for (const Point& p : right) out.push_back(p);
  return out;
}

double gradient_parallelism(const FieldFn& a, const FieldFn& b,
                            const std::vector<Point>& pts, double h_scale) {
  double worst = 0.0;
  for (const Point& p : pts) {
    const double h =
        h_scale * std::max({1.0, std::abs(p.x), std::abs(p.y)});
    const double ax = (a(p.x + h, p.y) - a(p.x - h, p.y)) / (2.0 * h);
    const double ay = (a(p.x, p.y + h) - a(p.x, p.y - h)) / (2.0 * h);
    const double bx = (b(p.x + h, p.y) - b(p.x - h, p.y)) / (2.0 * h);
    const double by = (b(p.x, p.y + h) - b(p.x, p.y - h)) / (2.0 * h);
    const double na = std::hypot(ax, ay);
    const double nb = std::hypot(bx, by);
    if (na == 0.0 || nb == 0.0)
      throw CurveError("zero gradient at (" + std::to_string(p.x) + ", " +
                       std::to_string(p.y) + ")");
    worst = std::max(worst, std::abs(ax * by - ay * bx) / (na * nb));
  }
  return worst;
}

}  // namespace adiabat::oracles
