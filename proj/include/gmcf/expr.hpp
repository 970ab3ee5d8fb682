#pragma once

// Small symbolic expressions over (x1, x2, u) with exact differentiation.
// Used for the prescribed data h, g, f, the warp profile phi and initial
// fields. Trees are immutable and shared, so copies are cheap.

#include "gmcf/grid.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gmcf {

enum class Var { x1, x2, u };

/// Raised when evaluation hits a division by zero or a log of a nonpositive
/// number. The message names the offending subexpression.
class EvalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Syntax error with a 1-based position.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& bare_message() const { return bare_; }

 private:
  std::string bare_;
  int line_;
  int column_;
};

class Expr {
 public:
  enum class Kind { constant, variable, add, sub, mul, div, pow, neg, sin, cos, sinh, cosh, tanh, exp, log };

  /// The zero constant.
  Expr();
  static Expr constant(double value);
  static Expr variable(Var var);

  Kind kind() const;
  /// Value of a constant node; only meaningful when kind() == constant.
  double value() const;
  bool is_constant() const { return kind() == Kind::constant; }
  bool is_zero() const { return is_constant() && value() == 0.0; }

  double eval(const Point& x, double u) const;
  /// Convenience for expressions of u alone.
  double eval(double u) const { return eval(Point{0.0, 0.0}, u); }

  Expr diff(Var var) const;
  bool depends_on(Var var) const;

  /// Infix rendering that parses back to an equal tree.
  std::string to_string() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& base, int exponent);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr sinh(const Expr& a);
  friend Expr cosh(const Expr& a);
  friend Expr tanh(const Expr& a);
  friend Expr exp(const Expr& a);
  friend Expr log(const Expr& a);

  /// Structural equality.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr unary(Kind kind, const Expr& a);
  static Expr binary(Kind kind, const Expr& a, const Expr& b);
  static double eval_node(const std::shared_ptr<const Node>& node, const Point& x, double u);

  std::shared_ptr<const Node> node_;
};

Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr sinh(const Expr& a);
Expr cosh(const Expr& a);
Expr tanh(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);

/// Parses standard infix syntax:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' integer)?
///   integer := ['-'] digits | '(' ['-'] digits ')'
///   primary := number | 'pi' | 'x1' | 'x2' | 'u' | func '(' expr ')' | '(' expr ')'
///   func    := sin | cos | sinh | cosh | tanh | exp | log
///
/// Exponents are integers only. Errors report the 1-based column.
Expr parse_expr(std::string_view text);

}  // namespace gmcf
