#include "gmcf/expr.hpp"

#include <charconv>
#include <cmath>

namespace gmcf {

ParseError::ParseError(std::string message, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      bare_(std::move(message)),
      line_(line),
      column_(column) {}

struct Expr::Node {
  Kind kind = Kind::constant;
  double value = 0.0;
  Var var = Var::u;
  int exponent = 0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using Kind = Expr::Kind;

const char* function_name(Kind k) {
  switch (k) {
    case Kind::sin: return "sin";
    case Kind::cos: return "cos";
    case Kind::sinh: return "sinh";
    case Kind::cosh: return "cosh";
    case Kind::tanh: return "tanh";
    case Kind::exp: return "exp";
    case Kind::log: return "log";
    default: return nullptr;
  }
}

double apply_function(Kind k, double v) {
  switch (k) {
    case Kind::neg: return -v;
    case Kind::sin: return std::sin(v);
    case Kind::cos: return std::cos(v);
    case Kind::sinh: return std::sinh(v);
    case Kind::cosh: return std::cosh(v);
    case Kind::tanh: return std::tanh(v);
    case Kind::exp: return std::exp(v);
    case Kind::log: return std::log(v);
    default: return v;
  }
}

int precedence(Kind k) {
  switch (k) {
    case Kind::add:
    case Kind::sub: return 1;
    case Kind::mul:
    case Kind::div: return 2;
    case Kind::neg: return 3;
    case Kind::pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(Var var) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::variable;
  n->var = var;
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }

Expr Expr::unary(Kind kind, const Expr& a) {
  if (a.is_constant() && kind != Kind::log) return constant(apply_function(kind, a.value()));
  if (a.is_constant() && a.value() > 0.0) return constant(std::log(a.value()));
  if (kind == Kind::neg && a.kind() == Kind::neg) return Expr(a.node_->a);
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = a.node_;
  return Expr(std::move(n));
}

Expr Expr::binary(Kind kind, const Expr& a, const Expr& b) {
  const bool ca = a.is_constant(), cb = b.is_constant();
  switch (kind) {
    case Kind::add:
      if (ca && cb) return constant(a.value() + b.value());
      if (a.is_zero()) return b;
      if (b.is_zero()) return a;
      break;
    case Kind::sub:
      if (ca && cb) return constant(a.value() - b.value());
      if (b.is_zero()) return a;
      if (a.is_zero()) return -b;
      break;
    case Kind::mul:
      if (ca && cb) return constant(a.value() * b.value());
      if (a.is_zero() || b.is_zero()) return constant(0.0);
      if (ca && a.value() == 1.0) return b;
      if (cb && b.value() == 1.0) return a;
      break;
    case Kind::div:
      if (ca && cb && b.value() != 0.0) return constant(a.value() / b.value());
      if (a.is_zero() && !(cb && b.value() == 0.0)) return constant(0.0);
      if (cb && b.value() == 1.0) return a;
      break;
    default: break;
  }
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = a.node_;
  n->b = b.node_;
  return Expr(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Expr::Kind::add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Expr::Kind::sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Expr::Kind::mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Expr::Kind::div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(Expr::Kind::neg, a); }
Expr sin(const Expr& a) { return Expr::unary(Expr::Kind::sin, a); }
Expr cos(const Expr& a) { return Expr::unary(Expr::Kind::cos, a); }
Expr sinh(const Expr& a) { return Expr::unary(Expr::Kind::sinh, a); }
Expr cosh(const Expr& a) { return Expr::unary(Expr::Kind::cosh, a); }
Expr tanh(const Expr& a) { return Expr::unary(Expr::Kind::tanh, a); }
Expr exp(const Expr& a) { return Expr::unary(Expr::Kind::exp, a); }
Expr log(const Expr& a) { return Expr::unary(Expr::Kind::log, a); }

Expr pow(const Expr& base, int exponent) {
  if (exponent == 0) return Expr::constant(1.0);
  if (exponent == 1) return base;
  if (base.is_constant()) return Expr::constant(std::pow(base.value(), exponent));
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::pow;
  n->a = base.node_;
  n->exponent = exponent;
  return Expr(std::move(n));
}

double Expr::eval_node(const std::shared_ptr<const Node>& p, const Point& x, double u) {
  const Node& n = *p;
  switch (n.kind) {
    case Kind::constant: return n.value;
    case Kind::variable:
      switch (n.var) {
        case Var::x1: return x[0];
        case Var::x2: return x[1];
        case Var::u: return u;
      }
      return 0.0;
    case Kind::add: return eval_node(n.a, x, u) + eval_node(n.b, x, u);
    case Kind::sub: return eval_node(n.a, x, u) - eval_node(n.b, x, u);
    case Kind::mul: return eval_node(n.a, x, u) * eval_node(n.b, x, u);
    case Kind::div: {
      const double den = eval_node(n.b, x, u);
      if (den == 0.0) throw EvalError("division by zero in " + Expr(p).to_string());
      return eval_node(n.a, x, u) / den;
    }
    case Kind::pow: {
      const double base = eval_node(n.a, x, u);
      if (base == 0.0 && n.exponent < 0)
        throw EvalError("division by zero in " + Expr(p).to_string());
      return std::pow(base, n.exponent);
    }
    case Kind::log: {
      const double arg = eval_node(n.a, x, u);
      if (!(arg > 0.0)) throw EvalError("log of nonpositive argument in " + Expr(p).to_string());
      return std::log(arg);
    }
    default: return apply_function(n.kind, eval_node(n.a, x, u));
  }
}

double Expr::eval(const Point& x, double u) const { return eval_node(node_, x, u); }

Expr Expr::diff(Var var) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::constant: return constant(0.0);
    case Kind::variable: return constant(n.var == var ? 1.0 : 0.0);
    default: break;
  }
  const Expr a(n.a);
  const Expr da = a.diff(var);
  switch (n.kind) {
    case Kind::add: return da + Expr(n.b).diff(var);
    case Kind::sub: return da - Expr(n.b).diff(var);
    case Kind::mul: {
      const Expr b(n.b);
      return da * b + a * b.diff(var);
    }
    case Kind::div: {
      const Expr b(n.b);
      return (da * b - a * b.diff(var)) / pow(b, 2);
    }
    case Kind::pow: return constant(n.exponent) * pow(a, n.exponent - 1) * da;
    case Kind::neg: return -da;
    case Kind::sin: return cos(a) * da;
    case Kind::cos: return -(sin(a) * da);
    case Kind::sinh: return cosh(a) * da;
    case Kind::cosh: return sinh(a) * da;
    case Kind::tanh: return da / pow(cosh(a), 2);
    case Kind::exp: return *this * da;
    case Kind::log: return da / a;
    default: return constant(0.0);
  }
}

bool Expr::depends_on(Var var) const {
  const Node& n = *node_;
  if (n.kind == Kind::constant) return false;
  if (n.kind == Kind::variable) return n.var == var;
  if (Expr(n.a).depends_on(var)) return true;
  return n.b && Expr(n.b).depends_on(var);
}

std::string Expr::to_string() const {
  const Node& n = *node_;
  const auto wrap = [](const Expr& e, bool parens) {
    return parens ? "(" + e.to_string() + ")" : e.to_string();
  };
  switch (n.kind) {
    case Kind::constant: return format_number(n.value);
    case Kind::variable:
      return n.var == Var::x1 ? "x1" : n.var == Var::x2 ? "x2" : "u";
    case Kind::add:
    case Kind::sub:
    case Kind::mul:
    case Kind::div: {
      const int p = precedence(n.kind);
      const Expr a(n.a), b(n.b);
      const char* op = n.kind == Kind::add ? "+" : n.kind == Kind::sub ? "-" : n.kind == Kind::mul ? "*" : "/";
      const bool left_parens = precedence(a.kind()) < p;
      // Negative constants print with a leading '-', which re-parses as a
      // unary minus and folds back to the same constant.
      const bool right_parens = precedence(b.kind()) <= p && !(b.is_constant());
      return wrap(a, left_parens) + op + wrap(b, right_parens);
    }
    case Kind::neg: {
      const Expr a(n.a);
      return "-" + wrap(a, precedence(a.kind()) < 4 || (a.is_constant() && a.value() < 0));
    }
    case Kind::pow: {
      const Expr a(n.a);
      const bool parens = precedence(a.kind()) < 5;
      return wrap(a, parens) + "^" + (n.exponent < 0 ? "(" + std::to_string(n.exponent) + ")" : std::to_string(n.exponent));
    }
    default: return std::string(function_name(n.kind)) + "(" + Expr(n.a).to_string() + ")";
  }
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const Expr::Node& x = *a.node_;
  const Expr::Node& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Expr::Kind::constant: return x.value == y.value;
    case Expr::Kind::variable: return x.var == y.var;
    case Expr::Kind::pow: return x.exponent == y.exponent && Expr(x.a) == Expr(y.a);
    default: break;
  }
  if (!(Expr(x.a) == Expr(y.a))) return false;
  if (!x.b) return !y.b;
  return y.b && Expr(x.b) == Expr(y.b);
}

}  // namespace gmcf
