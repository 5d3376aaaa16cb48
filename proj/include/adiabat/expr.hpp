#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "adiabat/errors.hpp"

namespace adiabat {

enum class Var { X, Y, T };

class FunctionRegistry;
struct ScalarFunction1D;

namespace detail {
struct Node;
struct ExprAccess;
using NodePtr = std::shared_ptr<const Node>;
}  // namespace detail

/// Immutable arithmetic expression over the variables x, y and t.
///
/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | base ('^' factor)?
///   base   := number | 'x' | 'y' | 't' | ident '(' expr ')' | '(' expr ')'
/// where ident is one of ln, exp, sqrt, or a registered 1-D function name.
///
/// Expressions are immutable after parse; evaluation is reentrant and safe to
/// call from many threads concurrently.
class Expression {
 public:
  Expression() = default;

  static Expression parse(std::string_view text,
                          const FunctionRegistry& functions);
  static Expression parse(std::string_view text);
  static Expression number(double value);
  static Expression variable(Var v);

  bool valid() const { return root_ != nullptr; }

  /// Evaluate with x and y bound (t unbound). Non-finite intermediate results
  /// and domain violations throw EvalError.
  double eval(double x, double y) const;

  /// Evaluate a single-variable body with t bound (x and y unbound).
  double eval1(double t) const;

  /// Exact symbolic derivative, lightly simplified (constant folding and
  /// 0/1 identities). Closed: the result is again an Expression.
  Expression derivative(Var v) const;

  bool uses(Var v) const;

  /// Parseable text form; parse(str()) evaluates identically.
  std::string str() const;

 private:
  explicit Expression(detail::NodePtr root) : root_(std::move(root)) {}
  detail::NodePtr root_;

  friend class FunctionRegistry;
  friend struct detail::ExprAccess;
};

/// A registered single-variable function (phi, gamma, ...): an expression in
/// t together with its analytic derivative, an optional strict-monotonicity
/// promise, and the tolerance used by the numeric inverse.
struct ScalarFunction1D {
  std::string name;
  Expression body;             // function of t only
  Expression body_derivative;  // d body / dt
  bool strictly_monotone = false;
  double inverse_tol = 1e-12;

  double value(double t) const { return body.eval1(t); }
  double slope(double t) const { return body_derivative.eval1(t); }

  /// Numeric inverse on [lo, hi] by bracketed root solving.
  double invert(double value, double lo, double hi) const;
};

/// Named 1-D functions available to the parser. Definitions are immutable
/// once entered; expressions capture shared references, so a parsed
/// Expression is unaffected by later registry changes.
class FunctionRegistry {
 public:
  FunctionRegistry() = default;

  /// Parses `body_text` (a function of t; earlier definitions are visible),
  /// derives its analytic derivative and stores both under `name`.
  void define(const std::string& name, std::string_view body_text,
              bool strictly_monotone = false, double inverse_tol = 1e-12);

  std::shared_ptr<const ScalarFunction1D> find(const std::string& name) const;
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;  // sorted

 private:
  std::map<std::string, std::shared_ptr<const ScalarFunction1D>> table_;
};

}  // namespace adiabat
