#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "adiabat/expr.hpp"

using adiabat::ConfigError;
using adiabat::EvalError;
using adiabat::Expression;
using adiabat::FunctionRegistry;
using adiabat::ParseError;
using adiabat::Var;

namespace {

FunctionRegistry fixture_registry() {
  FunctionRegistry reg;
  reg.define("phi", "t + t^2/2", /*strictly_monotone=*/true);
  reg.define("gamma", "1 + 1/(1+t)");
  return reg;
}

// expressions evaluable on (0.5, 2)^2, used by the property tests
const std::vector<std::string>& fixture_expressions() {
  static const std::vector<std::string> exprs = {
      "x*y",
      "x^2*y^2",
      "x*y^(5/3)",
      "phi(x*y)",
      "x*y^gamma(x*y)",
      "ln(x*y^2)",
      "x^(-0.6)",
      "sqrt(x) + exp(y/2)",
      "(x - 3)^2/(y + 1) - x/y",
  };
  return exprs;
}

}  // namespace

TEST_CASE("parse and eval basics") {
  CHECK(Expression::parse("x*y").eval(2.0, 3.0) == doctest::Approx(6.0));
  CHECK(Expression::parse("x*y").eval(0.0, 5.0) == 0.0);
  // independent check: 4^(-0.6) = exp(-0.6 ln 4)
  CHECK(Expression::parse("x^(-0.6)").eval(4.0, 1.0) ==
        doctest::Approx(std::exp(-0.6 * std::log(4.0))).epsilon(1e-12));
  CHECK(Expression::parse("x^(-0.6)").eval(4.0, 1.0) ==
        doctest::Approx(0.43528).epsilon(1e-4));
  CHECK(Expression::parse("ln(x*y^2)").eval(1.0, 1.0) == 0.0);
  CHECK(Expression::parse("2 + 3*4").eval(0.0, 0.0) == 14.0);
  CHECK(Expression::parse("2^3^2").eval(0.0, 0.0) == 512.0);  // right assoc
  CHECK(Expression::parse("-x^2").eval(3.0, 0.0) == -9.0);
  CHECK(Expression::parse("(-0.5)^2").eval(0.0, 0.0) == 0.25);
  CHECK(Expression::parse("1.5e2").eval(0.0, 0.0) == 150.0);
}

TEST_CASE("eval domain errors") {
  CHECK_THROWS_AS(Expression::parse("ln(x)").eval(-1.0, 0.0), EvalError);
  CHECK_THROWS_AS(Expression::parse("ln(x)").eval(0.0, 0.0), EvalError);
  CHECK_THROWS_AS(Expression::parse("sqrt(x)").eval(-4.0, 0.0), EvalError);
  CHECK_THROWS_AS(Expression::parse("x/y").eval(1.0, 0.0), EvalError);
  CHECK_THROWS_AS(Expression::parse("x^(0.5)").eval(-2.0, 0.0), EvalError);
  // integer exponents stay valid for negative bases
  CHECK(Expression::parse("x^2").eval(-2.0, 0.0) == 4.0);
  CHECK(Expression::parse("x^(-2)").eval(-2.0, 0.0) == 0.25);
  // overflow is reported, not propagated
  CHECK_THROWS_AS(Expression::parse("exp(x)").eval(1e6, 0.0), EvalError);
  // t is unbound in the two-variable entry point
  CHECK_THROWS_AS(Expression::parse("t + 1").eval(1.0, 1.0), EvalError);
}

TEST_CASE("parse errors carry byte offsets") {
  CHECK_THROWS_AS(Expression::parse("x +"), ParseError);
  CHECK_THROWS_AS(Expression::parse("(x"), ParseError);
  CHECK_THROWS_AS(Expression::parse("x y"), ParseError);
  CHECK_THROWS_AS(Expression::parse("foo(x)"), ParseError);
  try {
    Expression::parse("x * bar(y)");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
    CHECK(std::string(e.what()).find("bar") != std::string::npos);
  }
  try {
    Expression::parse("x + y)");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
  }
}

TEST_CASE("differentiate: exact derivatives") {
  const Expression xy = Expression::parse("x*y");
  const Expression d = xy.derivative(Var::Y);
  CHECK(d.str() == "x");
  CHECK(d.eval(2.0, 3.0) == 2.0);

  const Expression e2 = Expression::parse("x^2*y^2");
  const Expression d2 = e2.derivative(Var::Y);
  CHECK(d2.eval(1.0, 2.0) == doctest::Approx(4.0).epsilon(1e-14));

  CHECK(Expression::parse("42").derivative(Var::X).str() == "0");
  CHECK(Expression::parse("ln(x)").derivative(Var::X).eval(2.0, 0.0) ==
        doctest::Approx(0.5));
}

TEST_CASE("differentiate: registered functions use their analytic bodies") {
  const FunctionRegistry reg = fixture_registry();
  const Expression e = Expression::parse("phi(x*y)", reg);
  // d/dy phi(x y) = phi'(x y) * x = (1 + x y) x
  const Expression d = e.derivative(Var::Y);
  CHECK(d.eval(2.0, 3.0) == doctest::Approx((1.0 + 6.0) * 2.0).epsilon(1e-14));
}

TEST_CASE("property: derivatives agree with central differences") {
  const FunctionRegistry reg = fixture_registry();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (const std::string& text : fixture_expressions()) {
    const Expression e = Expression::parse(text, reg);
    const Expression dx = e.derivative(Var::X);
    const Expression dy = e.derivative(Var::Y);
    for (int k = 0; k < 200; ++k) {
      const double x = u(rng);
      const double y = u(rng);
      const double hx = 1e-5 * std::max(1.0, std::abs(x));
      const double hy = 1e-5 * std::max(1.0, std::abs(y));
      const double fd_x = (e.eval(x + hx, y) - e.eval(x - hx, y)) / (2 * hx);
      const double fd_y = (e.eval(x, y + hy) - e.eval(x, y - hy)) / (2 * hy);
      const double ex = dx.eval(x, y);
      const double ey = dy.eval(x, y);
      CHECK(std::abs(ex - fd_x) <= 1e-6 * (1.0 + std::abs(ex)));
      CHECK(std::abs(ey - fd_y) <= 1e-6 * (1.0 + std::abs(ey)));
    }
  }
}

TEST_CASE("property: parse(print(e)) evaluates identically") {
  const FunctionRegistry reg = fixture_registry();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (const std::string& text : fixture_expressions()) {
    const Expression e = Expression::parse(text, reg);
    const Expression r = Expression::parse(e.str(), reg);
    for (int k = 0; k < 100; ++k) {
      const double x = u(rng);
      const double y = u(rng);
      CHECK(e.eval(x, y) == r.eval(x, y));
    }
    // derivatives round-trip too
    const Expression d = e.derivative(Var::X);
    const Expression rd = Expression::parse(d.str(), reg);
    for (int k = 0; k < 20; ++k) {
      const double x = u(rng);
      const double y = u(rng);
      CHECK(d.eval(x, y) == rd.eval(x, y));
    }
  }
}

TEST_CASE("registry validation") {
  FunctionRegistry reg;
  CHECK_THROWS_AS(reg.define("ln", "t"), ConfigError);
  CHECK_THROWS_AS(reg.define("x", "t"), ConfigError);
  CHECK_THROWS_AS(reg.define("f", "x + t"), ConfigError);  // x not allowed
  reg.define("f", "2*t");
  CHECK_THROWS_AS(reg.define("f", "3*t"), ConfigError);  // already defined
  CHECK(reg.contains("f"));
  CHECK(reg.find("f")->value(2.0) == 4.0);
  // registered names nest
  reg.define("g", "f(t) + 1");
  CHECK(reg.find("g")->value(2.0) == 5.0);
}

TEST_CASE("ScalarFunction1D: monotone flag and numeric inverse") {
  FunctionRegistry reg;
  reg.define("phi", "t + t^2/2", /*strictly_monotone=*/true, 1e-13);
  const auto phi = reg.find("phi");
  REQUIRE(phi);
  CHECK(phi->strictly_monotone);
  CHECK(phi->value(1.0) == doctest::Approx(1.5));
  CHECK(phi->slope(1.0) == doctest::Approx(2.0));

  // sorted inputs give sorted outputs on (0, 4)
  double prev = phi->value(0.0);
  for (int k = 1; k <= 40; ++k) {
    const double cur = phi->value(0.1 * k);
    CHECK(cur > prev);
    prev = cur;
  }

  // phi^{-1}(1.5) = 1 by solving t + t^2/2 = 1.5
  CHECK(phi->invert(1.5, 0.0, 4.0) == doctest::Approx(1.0).epsilon(1e-10));
}
