#pragma once

// Formula trees over a single real variable.
//
// Grammar (EBNF, whitespace ignored):
//
//   expr    = term , { ("+" | "-") , term } ;
//   term    = unary , { ("*" | "/") , unary } ;
//   unary   = [ "+" | "-" ] , power ;
//   power   = primary , [ "^" , unary ] ;          (right associative)
//   primary = number
//           | identifier
//           | identifier , "(" , expr , { "," , expr } , ")"
//           | "(" , expr , ")" ;
//   number  = digits , [ "." , [digits] ] , [ exponent ] | "." , digits , [ exponent ] ;
//   exponent= ("e" | "E") , [ "+" | "-" ] , digits ;
//
// Functions: exp log sinh cosh tanh sin cos sqrt (one argument), pow (two).
// Identifiers: the bound variable, the constants `pi` and `e`, and any name
// supplied in the parameter table at parse time.

#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace feller {

using ParamTable = std::map<std::string, double>;

/// Value and first derivative of a quantity, both held as sign * exp(log).
/// Zero is sign 0 with log -inf. This is what lets exp(-r^3) at r = 20 be
/// evaluated without underflow.
struct LogDual {
  double lv = 0.0;  // log |value|
  int sv = 1;       // sign of value
  double ld = 0.0;  // log |derivative|
  int sd = 0;       // sign of derivative

  [[nodiscard]] double value() const;
  [[nodiscard]] double derivative() const;
  /// f'/f; requires a nonzero value.
  [[nodiscard]] double log_derivative() const;
};

/// Plain forward-mode value/derivative pair.
struct Dual {
  double v = 0.0;
  double d = 0.0;
};

class Expr {
 public:
  struct Node;

  Expr() = default;

  static Expr constant(double c);
  static Expr variable();

  /// Parses `text` with `var` as the bound variable. Throws ParseError naming
  /// the offending token.
  static Expr parse(std::string_view text, std::string_view var = "r", const ParamTable& params = {});

  [[nodiscard]] bool empty() const noexcept { return node_ == nullptr; }
  [[nodiscard]] bool is_constant() const;
  [[nodiscard]] double constant_value() const;

  [[nodiscard]] double eval(double x) const;
  [[nodiscard]] Dual eval_dual(double x) const;
  [[nodiscard]] LogDual eval_log(double x) const;

  /// Symbolic derivative with respect to the bound variable.
  [[nodiscard]] Expr derivative() const;
  /// Replaces the bound variable with `inner`.
  [[nodiscard]] Expr compose(const Expr& inner) const;

  [[nodiscard]] std::string to_string() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& a, const Expr& b);
  friend Expr exp(const Expr& a);
  friend Expr log(const Expr& a);

  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  [[nodiscard]] const std::shared_ptr<const Node>& node() const noexcept { return node_; }

 private:
  std::shared_ptr<const Node> node_;
};

}  // namespace feller
