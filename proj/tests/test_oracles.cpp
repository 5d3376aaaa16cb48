#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "adiabat/calibrated.hpp"
#include "adiabat/oracles.hpp"
#include "test_util.hpp"

using namespace adiabat;
using namespace adiabat::oracles;

TEST_CASE("ideal_gas_entropy: closed form") {
  CHECK(ideal_gas_entropy(5.0 / 3.0, 1.0, 1.0) == 0.0);
  // 1/(gamma-1) ln(x y^gamma) at (1,2) = 2.5 ln 2
  CHECK(ideal_gas_entropy(5.0 / 3.0, 1.0, 2.0) ==
        doctest::Approx(2.5 * std::log(2.0)).epsilon(1e-14));
  CHECK(ideal_gas_entropy(5.0 / 3.0, 1.0, 2.0) ==
        doctest::Approx(1.732868).epsilon(1e-6));
  // constancy on y = x^(-3/5)
  for (int k = 0; k <= 20; ++k) {
    const double x = 0.5 + 1.5 * k / 20.0;
    CHECK(std::abs(ideal_gas_entropy(5.0 / 3.0, x, std::pow(x, -0.6))) <=
          1e-12);
  }
  CHECK_THROWS_AS(ideal_gas_entropy(5.0 / 3.0, -1.0, 1.0), DomainError);
  CHECK_THROWS_AS(ideal_gas_entropy(1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("fixtures: closed-form entropy is constant on declared adiabats") {
  for (const Fixture& fx :
       {ideal_gas_fixture(), ideal_gas_two_adiabats_fixture(),
        feynman_gas_fixture(), squared_calibration_fixture()}) {
    REQUIRE(fx.entropy_closed_form.has_value());
    auto ctx = fx.make_context();
    for (const CurveSpec& curve : fx.adiabats) {
      const auto pts = sample_curve(curve, *ctx, 65);
      double lo = 1e300, hi = -1e300;
      for (const Point& p : pts) {
        const double s = fx.entropy_closed_form->eval(p.x, p.y);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      CHECK(hi - lo <= 1e-10);
    }
  }
}

TEST_CASE("adiabat_ode_trace: ideal gas stays on x y^gamma = const") {
  const Fixture fx = ideal_gas_fixture();
  const Polyline trace = adiabat_ode_trace(fx, {1.0, 1.0}, 0.5, 2.0);
  REQUIRE(trace.size() > 100);
  CHECK(trace.front().x == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(trace.back().x == doctest::Approx(2.0).epsilon(1e-12));
  for (const Point& p : trace) {
    // invariant x y^(5/3) = 1 along the trace
    CHECK(std::abs(p.x * std::pow(p.y, 5.0 / 3.0) - 1.0) <= 1e-8);
  }
}

TEST_CASE("adiabat_ode_trace: Feynman gas keeps s = x y^gamma(xy) constant") {
  const Fixture fx = feynman_gas_fixture();
  const Polyline trace = adiabat_ode_trace(fx, {1.0, 1.0}, 0.5, 2.0);
  REQUIRE(trace.size() > 100);
  const Expression& s = *fx.entropy_closed_form;
  for (const Point& p : trace)
    CHECK(std::abs(s.eval(p.x, p.y) - 1.0) <= 1e-6);
}

TEST_CASE("adiabat_ode_trace: edge cases") {
  const Fixture fx = ideal_gas_fixture();
  // zero-length span yields the single start point
  const Polyline single = adiabat_ode_trace(fx, {1.0, 1.0}, 1.0, 1.0);
  REQUIRE(single.size() == 1);
  CHECK(single[0].x == 1.0);
  CHECK(single[0].y == 1.0);
  // start outside the domain
  CHECK_THROWS_AS(adiabat_ode_trace(fx, {10.0, 1.0}, 0.5, 2.0), DomainError);
  // the adiabat through (0.5, 0.5) exits through y_min before x reaches 2
  CHECK_THROWS_AS(adiabat_ode_trace(fx, {0.5, 0.5}, 0.5, 2.0), CurveError);
  // a fixture without a closed form cannot be traced
  Fixture stripped = ideal_gas_fixture();
  stripped.entropy_closed_form.reset();
  CHECK_THROWS_AS(adiabat_ode_trace(stripped, {1.0, 1.0}, 0.5, 2.0),
                  CurveError);
}

TEST_CASE("gradient_parallelism: trivial and relabeled fields") {
  auto field_a = [](double x, double y) { return x * x + 2.0 * y; };
  auto field_b = [](double x, double y) {
    return 2.0 * (x * x + 2.0 * y) + 7.0;
  };
  const auto pts = testutil::random_points({0.5, 2.0, 0.5, 2.0}, 30, 42);
  CHECK(gradient_parallelism(field_a, field_a, pts) == 0.0);
  // a monotone relabeling has the same level-curve family; the wider stencil
  // keeps the cancellation rounding of the affine offset below 1e-12
  CHECK(gradient_parallelism(field_a, field_b, pts, 2e-3) <= 1e-12);

  auto rotated = [](double x, double y) { return x - y; };
  CHECK(gradient_parallelism(field_a, rotated, pts) > 0.1);

  auto flat = [](double, double) { return 1.0; };
  CHECK_THROWS_AS(gradient_parallelism(field_a, flat, pts), CurveError);
}
