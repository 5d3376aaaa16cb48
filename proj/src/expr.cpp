#include "adiabat/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "adiabat/numeric.hpp"

namespace adiabat {

namespace detail {

struct ExprAccess {
  static const NodePtr& root(const Expression& e) { return e.root_; }
};

enum class UnaryOp { Neg, Ln, Exp, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct Node {
  enum class Kind { Number, Variable, Unary, Binary, Call };

  Kind kind = Kind::Number;
  double number = 0.0;
  Var var = Var::X;
  UnaryOp uop = UnaryOp::Neg;
  BinaryOp bop = BinaryOp::Add;
  NodePtr a, b;
  std::shared_ptr<const ScalarFunction1D> fn;
};

namespace {

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Number;
  n->number = v;
  return n;
}

NodePtr make_variable(Var v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Variable;
  n->var = v;
  return n;
}

NodePtr make_unary(UnaryOp op, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Unary;
  n->uop = op;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(BinaryOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Binary;
  n->bop = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_call(std::shared_ptr<const ScalarFunction1D> fn, NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Call;
  n->fn = std::move(fn);
  n->a = std::move(arg);
  return n;
}

const char* var_name(Var v) {
  switch (v) {
    case Var::X: return "x";
    case Var::Y: return "y";
    case Var::T: return "t";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// printing

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// precedence levels: add/sub 1, mul/div 2, unary minus 3, pow 4, atoms 5
int precedence(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Number: return n.number < 0 ? 3 : 5;
    case Node::Kind::Variable:
    case Node::Kind::Call: return 5;
    case Node::Kind::Unary: return n.uop == UnaryOp::Neg ? 3 : 5;
    case Node::Kind::Binary:
      switch (n.bop) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 4;
      }
  }
  return 5;
}

std::string to_text(const Node& n);

std::string child_text(const Node& child, int min_prec) {
  std::string s = to_text(child);
  if (precedence(child) < min_prec) return "(" + s + ")";
  return s;
}

std::string to_text(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Number: return format_double(n.number);
    case Node::Kind::Variable: return var_name(n.var);
    case Node::Kind::Call: {
      const char* name = nullptr;
      if (n.fn) name = n.fn->name.c_str();
      return std::string(name ? name : "?") + "(" + to_text(*n.a) + ")";
    }
    case Node::Kind::Unary:
      switch (n.uop) {
        case UnaryOp::Neg: return "-" + child_text(*n.a, 4);
        case UnaryOp::Ln: return "ln(" + to_text(*n.a) + ")";
        case UnaryOp::Exp: return "exp(" + to_text(*n.a) + ")";
        case UnaryOp::Sqrt: return "sqrt(" + to_text(*n.a) + ")";
      }
      break;
    case Node::Kind::Binary: {
      const Node& a = *n.a;
      const Node& b = *n.b;
      switch (n.bop) {
        case BinaryOp::Add: return child_text(a, 1) + " + " + child_text(b, 2);
        case BinaryOp::Sub: return child_text(a, 1) + " - " + child_text(b, 2);
        case BinaryOp::Mul: return child_text(a, 2) + "*" + child_text(b, 3);
        case BinaryOp::Div: return child_text(a, 2) + "/" + child_text(b, 3);
        case BinaryOp::Pow: return child_text(a, 5) + "^" + child_text(b, 3);
      }
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// evaluation

struct Env {
  double x = 0.0, y = 0.0, t = 0.0;
  bool has_x = false, has_y = false, has_t = false;
};

[[noreturn]] void eval_fail(const Node& n, const std::string& what) {
  throw EvalError(what + " in '" + to_text(n) + "'");
}

bool is_integer_exponent(double p) {
  return p == std::nearbyint(p) && std::abs(p) <= 1e9;
}

double eval_node(const Node& n, const Env& env) {
  double result = 0.0;
  switch (n.kind) {
    case Node::Kind::Number:
      result = n.number;
      break;
    case Node::Kind::Variable:
      switch (n.var) {
        case Var::X:
          if (!env.has_x) eval_fail(n, "variable x is unbound");
          result = env.x;
          break;
        case Var::Y:
          if (!env.has_y) eval_fail(n, "variable y is unbound");
          result = env.y;
          break;
        case Var::T:
          if (!env.has_t) eval_fail(n, "variable t is unbound");
          result = env.t;
          break;
      }
      break;
    case Node::Kind::Unary: {
      const double a = eval_node(*n.a, env);
      switch (n.uop) {
        case UnaryOp::Neg: result = -a; break;
        case UnaryOp::Ln:
          if (a <= 0.0) eval_fail(n, "ln of non-positive argument");
          result = std::log(a);
          break;
        case UnaryOp::Exp: result = std::exp(a); break;
        case UnaryOp::Sqrt:
          if (a < 0.0) eval_fail(n, "sqrt of negative argument");
          result = std::sqrt(a);
          break;
      }
      break;
    }
    case Node::Kind::Binary: {
      const double a = eval_node(*n.a, env);
      const double b = eval_node(*n.b, env);
      switch (n.bop) {
        case BinaryOp::Add: result = a + b; break;
        case BinaryOp::Sub: result = a - b; break;
        case BinaryOp::Mul: result = a * b; break;
        case BinaryOp::Div:
          if (b == 0.0) eval_fail(n, "division by zero");
          result = a / b;
          break;
        case BinaryOp::Pow:
          if (is_integer_exponent(b)) {
            if (a == 0.0 && b < 0.0) eval_fail(n, "zero to a negative power");
          } else if (a <= 0.0) {
            eval_fail(n, "non-integer power of a non-positive base");
          }
          result = std::pow(a, b);
          break;
      }
      break;
    }
    case Node::Kind::Call: {
      const double arg = eval_node(*n.a, env);
      Env sub;
      sub.t = arg;
      sub.has_t = true;
      result = eval_node(*ExprAccess::root(n.fn->body), sub);
      break;
    }
  }
  if (!std::isfinite(result)) eval_fail(n, "non-finite value");
  return result;
}

bool node_uses(const Node& n, Var v) {
  switch (n.kind) {
    case Node::Kind::Number: return false;
    case Node::Kind::Variable: return n.var == v;
    case Node::Kind::Unary: return node_uses(*n.a, v);
    case Node::Kind::Binary: return node_uses(*n.a, v) || node_uses(*n.b, v);
    case Node::Kind::Call:
      // bodies are functions of t only; the call site shadows t
      return node_uses(*n.a, v);
  }
  return false;
}

// ---------------------------------------------------------------------------
// simplification: constant folding plus 0/1 identities, bottom-up

bool is_const(const NodePtr& n, double v) {
  return n->kind == Node::Kind::Number && n->number == v;
}

NodePtr simplify(const NodePtr& node);

NodePtr fold_constant(const NodePtr& node) {
  Env empty;
  try {
    const double v = eval_node(*node, empty);
    return make_number(v);
  } catch (const EvalError&) {
    return node;  // leave domain errors to evaluation time
  }
}

bool is_number(const NodePtr& n) { return n->kind == Node::Kind::Number; }

NodePtr simplify(const NodePtr& node) {
  switch (node->kind) {
    case Node::Kind::Number:
    case Node::Kind::Variable:
      return node;
    case Node::Kind::Call: {
      NodePtr a = simplify(node->a);
      NodePtr out = (a == node->a) ? node : make_call(node->fn, a);
      if (is_number(a)) return fold_constant(out);
      return out;
    }
    case Node::Kind::Unary: {
      NodePtr a = simplify(node->a);
      if (node->uop == UnaryOp::Neg) {
        if (a->kind == Node::Kind::Unary && a->uop == UnaryOp::Neg)
          return a->a;
        if (is_number(a)) return make_number(-a->number);
      }
      NodePtr out = (a == node->a) ? node : make_unary(node->uop, a);
      if (is_number(a)) return fold_constant(out);
      return out;
    }
    case Node::Kind::Binary: {
      NodePtr a = simplify(node->a);
      NodePtr b = simplify(node->b);
      switch (node->bop) {
        case BinaryOp::Add:
          if (is_const(a, 0.0)) return b;
          if (is_const(b, 0.0)) return a;
          break;
        case BinaryOp::Sub:
          if (is_const(b, 0.0)) return a;
          if (is_const(a, 0.0)) return simplify(make_unary(UnaryOp::Neg, b));
          break;
        case BinaryOp::Mul:
          if (is_const(a, 0.0) || is_const(b, 0.0)) return make_number(0.0);
          if (is_const(a, 1.0)) return b;
          if (is_const(b, 1.0)) return a;
          break;
        case BinaryOp::Div:
          if (is_const(b, 1.0)) return a;
          if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_number(0.0);
          break;
        case BinaryOp::Pow:
          if (is_const(b, 1.0)) return a;
          if (is_const(b, 0.0)) return make_number(1.0);
          break;
      }
      NodePtr out = (a == node->a && b == node->b)
                        ? node
                        : make_binary(node->bop, a, b);
      if (is_number(a) && is_number(b)) return fold_constant(out);
      return out;
    }
  }
  return node;
}

// ---------------------------------------------------------------------------
// substitution (used to inline derivative bodies of registered functions)

NodePtr substitute(const NodePtr& node, Var var, const NodePtr& repl) {
  switch (node->kind) {
    case Node::Kind::Number:
      return node;
    case Node::Kind::Variable:
      return node->var == var ? repl : node;
    case Node::Kind::Unary: {
      NodePtr a = substitute(node->a, var, repl);
      return a == node->a ? node : make_unary(node->uop, a);
    }
    case Node::Kind::Binary: {
      NodePtr a = substitute(node->a, var, repl);
      NodePtr b = substitute(node->b, var, repl);
      return (a == node->a && b == node->b) ? node
                                            : make_binary(node->bop, a, b);
    }
    case Node::Kind::Call: {
      NodePtr a = substitute(node->a, var, repl);
      return a == node->a ? node : make_call(node->fn, a);
    }
  }
  return node;
}

// ---------------------------------------------------------------------------
// differentiation

NodePtr diff(const NodePtr& node, Var v) {
  switch (node->kind) {
    case Node::Kind::Number:
      return make_number(0.0);
    case Node::Kind::Variable:
      return make_number(node->var == v ? 1.0 : 0.0);
    case Node::Kind::Unary: {
      NodePtr da = diff(node->a, v);
      switch (node->uop) {
        case UnaryOp::Neg:
          return make_unary(UnaryOp::Neg, da);
        case UnaryOp::Ln:
          return make_binary(BinaryOp::Div, da, node->a);
        case UnaryOp::Exp:
          return make_binary(BinaryOp::Mul, node, da);
        case UnaryOp::Sqrt:
          return make_binary(
              BinaryOp::Div, da,
              make_binary(BinaryOp::Mul, make_number(2.0), node));
      }
      break;
    }
    case Node::Kind::Binary: {
      const NodePtr& a = node->a;
      const NodePtr& b = node->b;
      NodePtr da = diff(a, v);
      NodePtr db = diff(b, v);
      switch (node->bop) {
        case BinaryOp::Add:
          return make_binary(BinaryOp::Add, da, db);
        case BinaryOp::Sub:
          return make_binary(BinaryOp::Sub, da, db);
        case BinaryOp::Mul:
          return make_binary(BinaryOp::Add,
                             make_binary(BinaryOp::Mul, da, b),
                             make_binary(BinaryOp::Mul, a, db));
        case BinaryOp::Div:
          return make_binary(
              BinaryOp::Div,
              make_binary(BinaryOp::Sub, make_binary(BinaryOp::Mul, da, b),
                          make_binary(BinaryOp::Mul, a, db)),
              make_binary(BinaryOp::Pow, b, make_number(2.0)));
        case BinaryOp::Pow:
          if (is_number(b)) {
            // power rule; keeps the derivative real for any base when the
            // exponent is an integer
            const double p = b->number;
            return make_binary(
                BinaryOp::Mul,
                make_binary(BinaryOp::Mul, make_number(p),
                            make_binary(BinaryOp::Pow, a,
                                        make_number(p - 1.0))),
                da);
          }
          // general a^b = exp(b ln a), requires a > 0 as does evaluation
          return make_binary(
              BinaryOp::Mul, node,
              make_binary(BinaryOp::Add,
                          make_binary(BinaryOp::Mul, db,
                                      make_unary(UnaryOp::Ln, a)),
                          make_binary(BinaryOp::Div,
                                      make_binary(BinaryOp::Mul, b, da), a)));
      }
      break;
    }
    case Node::Kind::Call: {
      // d/dv fn(a) = fn'(a) * da, with fn' inlined from the registered
      // derivative body
      NodePtr outer = substitute(ExprAccess::root(node->fn->body_derivative),
                                 Var::T, node->a);
      return make_binary(BinaryOp::Mul, outer, diff(node->a, v));
    }
  }
  return make_number(0.0);
}

// ---------------------------------------------------------------------------
// parser

class Parser {
 public:
  Parser(std::string_view text, const FunctionRegistry* fns)
      : s_(text), fns_(fns) {}

  NodePtr run() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  const FunctionRegistry* fns_;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, pos_);
  }

  void skip_ws() {
    while (pos_ < s_.size() &&
           (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' ||
            s_[pos_] == '\r'))
      ++pos_;
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    for (;;) {
      skip_ws();
      if (consume('+'))
        e = make_binary(BinaryOp::Add, e, parse_term());
      else if (consume('-'))
        e = make_binary(BinaryOp::Sub, e, parse_term());
      else
        return e;
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_factor();
    for (;;) {
      skip_ws();
      if (consume('*'))
        e = make_binary(BinaryOp::Mul, e, parse_factor());
      else if (consume('/'))
        e = make_binary(BinaryOp::Div, e, parse_factor());
      else
        return e;
    }
  }

  NodePtr parse_factor() {
    skip_ws();
    if (consume('-')) return make_unary(UnaryOp::Neg, parse_factor());
    NodePtr base = parse_base();
    skip_ws();
    if (consume('^')) return make_binary(BinaryOp::Pow, base, parse_factor());
    return base;
  }

  NodePtr parse_base() {
    skip_ws();
    const char c = peek();
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      skip_ws();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_identifier();
    if (c == '\0') fail("unexpected end of input");
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    double value = 0.0;
    const char* begin = s_.data() + pos_;
    const char* end = s_.data() + s_.size();
    auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(res.ptr - begin);
    return make_number(value);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
            s_[pos_] == '_'))
      ++pos_;
    const std::string id(s_.substr(start, pos_ - start));

    if (id == "x") return make_variable(Var::X);
    if (id == "y") return make_variable(Var::Y);
    if (id == "t") return make_variable(Var::T);

    UnaryOp uop = UnaryOp::Ln;
    bool builtin = true;
    if (id == "ln")
      uop = UnaryOp::Ln;
    else if (id == "exp")
      uop = UnaryOp::Exp;
    else if (id == "sqrt")
      uop = UnaryOp::Sqrt;
    else
      builtin = false;

    std::shared_ptr<const ScalarFunction1D> fn;
    if (!builtin) {
      if (fns_) fn = fns_->find(id);
      if (!fn) {
        pos_ = start;
        fail("unknown identifier '" + id + "'");
      }
    }

    skip_ws();
    if (!consume('(')) fail("expected '(' after '" + id + "'");
    NodePtr arg = parse_expr();
    skip_ws();
    if (!consume(')')) fail("expected ')'");
    return builtin ? make_unary(uop, arg) : make_call(std::move(fn), arg);
  }
};

}  // namespace
}  // namespace detail

// ---------------------------------------------------------------------------
// Expression

Expression Expression::parse(std::string_view text,
                             const FunctionRegistry& functions) {
  detail::Parser p(text, &functions);
  return Expression(p.run());
}

Expression Expression::parse(std::string_view text) {
  detail::Parser p(text, nullptr);
  return Expression(p.run());
}

Expression Expression::number(double value) {
  return Expression(detail::make_number(value));
}

Expression Expression::variable(Var v) {
  return Expression(detail::make_variable(v));
}

double Expression::eval(double x, double y) const {
  if (!root_) throw EvalError("empty expression");
  detail::Env env;
  env.x = x;
  env.y = y;
  env.has_x = env.has_y = true;
  return detail::eval_node(*root_, env);
}

double Expression::eval1(double t) const {
  if (!root_) throw EvalError("empty expression");
  detail::Env env;
  env.t = t;
  env.has_t = true;
  return detail::eval_node(*root_, env);
}

Expression Expression::derivative(Var v) const {
  if (!root_) throw EvalError("empty expression");
  return Expression(detail::simplify(detail::diff(root_, v)));
}

bool Expression::uses(Var v) const {
  return root_ && detail::node_uses(*root_, v);
}

std::string Expression::str() const {
  if (!root_) return "";
  return detail::to_text(*root_);
}

// ---------------------------------------------------------------------------
// ScalarFunction1D / FunctionRegistry

double ScalarFunction1D::invert(double target, double lo, double hi) const {
  if (!(lo < hi))
    throw InversionError("invert(" + name + "): empty bracket interval");
  const double r_lo = value(lo) - target;
  const double r_hi = value(hi) - target;
  numeric::RootOptions opts;
  opts.x_tol = inverse_tol;
  return numeric::solve_bracketed(
      [&](double t) { return value(t) - target; }, lo, hi, r_lo, r_hi, opts);
}

void FunctionRegistry::define(const std::string& name,
                              std::string_view body_text,
                              bool strictly_monotone, double inverse_tol) {
  if (name.empty() || name == "x" || name == "y" || name == "t" ||
      name == "ln" || name == "exp" || name == "sqrt")
    throw ConfigError("function name '" + name + "' is reserved");
  if (table_.count(name))
    throw ConfigError("function '" + name + "' is already defined");

  Expression body = Expression::parse(body_text, *this);
  if (body.uses(Var::X) || body.uses(Var::Y))
    throw ConfigError("function '" + name +
                      "' must be a function of t only, got '" +
                      std::string(body_text) + "'");

  auto fn = std::make_shared<ScalarFunction1D>();
  fn->name = name;
  fn->body = body;
  fn->body_derivative = body.derivative(Var::T);
  fn->strictly_monotone = strictly_monotone;
  fn->inverse_tol = inverse_tol;
  table_[name] = std::move(fn);
}

std::shared_ptr<const ScalarFunction1D> FunctionRegistry::find(
    const std::string& name) const {
  auto it = table_.find(name);
  return it == table_.end() ? nullptr : it->second;
}

bool FunctionRegistry::contains(const std::string& name) const {
  return table_.count(name) != 0;
}

std::vector<std::string> FunctionRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(table_.size());
  for (const auto& [k, v] : table_) out.push_back(k);
  return out;
}

}  // namespace adiabat
