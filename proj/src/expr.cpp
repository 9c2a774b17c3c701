#include "feller/expr.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "feller/error.hpp"

namespace feller {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530942;

enum class Kind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Sinh, Cosh, Tanh, Sin, Cos, Sqrt };

}  // namespace

struct Expr::Node {
  Kind kind;
  double c = 0.0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr, double c = 0.0) {
  return std::make_shared<const Expr::Node>(Expr::Node{k, c, std::move(a), std::move(b)});
}

NodePtr make_const(double c) { return make(Kind::Const, nullptr, nullptr, c); }

bool is_const(const NodePtr& n, double v) { return n->kind == Kind::Const && n->c == v; }

// Plain evaluation of a constant subtree (used for folding).
double eval_plain(const NodePtr& n, double x);

NodePtr fold(NodePtr n) {
  const bool ca = !n->a || n->a->kind == Kind::Const;
  const bool cb = !n->b || n->b->kind == Kind::Const;
  if (n->kind != Kind::Const && n->kind != Kind::Var && ca && cb) {
    const double v = eval_plain(n, 0.0);
    if (std::isfinite(v)) return make_const(v);
  }
  return n;
}

NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return fold(make(Kind::Add, std::move(a), std::move(b)));
}
NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return fold(make(Kind::Neg, std::move(b)));
  return fold(make(Kind::Sub, std::move(a), std::move(b)));
}
NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return fold(make(Kind::Mul, std::move(a), std::move(b)));
}
NodePtr div(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return make_const(0.0);
  if (is_const(b, 1.0)) return a;
  return fold(make(Kind::Div, std::move(a), std::move(b)));
}
NodePtr neg(NodePtr a) {
  if (a->kind == Kind::Neg) return a->a;
  return fold(make(Kind::Neg, std::move(a)));
}
NodePtr powr(NodePtr a, NodePtr b) {
  if (is_const(b, 1.0)) return a;
  if (is_const(b, 0.0)) return make_const(1.0);
  return fold(make(Kind::Pow, std::move(a), std::move(b)));
}
NodePtr unary(Kind k, NodePtr a) { return fold(make(k, std::move(a))); }

double eval_plain(const NodePtr& n, double x) {
  switch (n->kind) {
    case Kind::Const: return n->c;
    case Kind::Var: return x;
    case Kind::Neg: return -eval_plain(n->a, x);
    case Kind::Add: return eval_plain(n->a, x) + eval_plain(n->b, x);
    case Kind::Sub: return eval_plain(n->a, x) - eval_plain(n->b, x);
    case Kind::Mul: return eval_plain(n->a, x) * eval_plain(n->b, x);
    case Kind::Div: return eval_plain(n->a, x) / eval_plain(n->b, x);
    case Kind::Pow: return std::pow(eval_plain(n->a, x), eval_plain(n->b, x));
    case Kind::Exp: return std::exp(eval_plain(n->a, x));
    case Kind::Log: return std::log(eval_plain(n->a, x));
    case Kind::Sinh: return std::sinh(eval_plain(n->a, x));
    case Kind::Cosh: return std::cosh(eval_plain(n->a, x));
    case Kind::Tanh: return std::tanh(eval_plain(n->a, x));
    case Kind::Sin: return std::sin(eval_plain(n->a, x));
    case Kind::Cos: return std::cos(eval_plain(n->a, x));
    case Kind::Sqrt: return std::sqrt(eval_plain(n->a, x));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Dual eval_dual_node(const NodePtr& n, double x) {
  switch (n->kind) {
    case Kind::Const: return {n->c, 0.0};
    case Kind::Var: return {x, 1.0};
    case Kind::Neg: {
      const Dual a = eval_dual_node(n->a, x);
      return {-a.v, -a.d};
    }
    case Kind::Add: {
      const Dual a = eval_dual_node(n->a, x), b = eval_dual_node(n->b, x);
      return {a.v + b.v, a.d + b.d};
    }
    case Kind::Sub: {
      const Dual a = eval_dual_node(n->a, x), b = eval_dual_node(n->b, x);
      return {a.v - b.v, a.d - b.d};
    }
    case Kind::Mul: {
      const Dual a = eval_dual_node(n->a, x), b = eval_dual_node(n->b, x);
      return {a.v * b.v, a.d * b.v + a.v * b.d};
    }
    case Kind::Div: {
      const Dual a = eval_dual_node(n->a, x), b = eval_dual_node(n->b, x);
      return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
    }
    case Kind::Pow: {
      const Dual a = eval_dual_node(n->a, x);
      if (n->b->kind == Kind::Const) {
        const double c = n->b->c;
        return {std::pow(a.v, c), c == 0.0 ? 0.0 : c * std::pow(a.v, c - 1.0) * a.d};
      }
      const Dual b = eval_dual_node(n->b, x);
      const double v = std::pow(a.v, b.v);
      return {v, v * (b.d * std::log(a.v) + b.v * a.d / a.v)};
    }
    case Kind::Exp: {
      const Dual a = eval_dual_node(n->a, x);
      const double e = std::exp(a.v);
      return {e, e * a.d};
    }
    case Kind::Log: {
      const Dual a = eval_dual_node(n->a, x);
      return {std::log(a.v), a.d / a.v};
    }
    case Kind::Sinh: {
      const Dual a = eval_dual_node(n->a, x);
      return {std::sinh(a.v), std::cosh(a.v) * a.d};
    }
    case Kind::Cosh: {
      const Dual a = eval_dual_node(n->a, x);
      return {std::cosh(a.v), std::sinh(a.v) * a.d};
    }
    case Kind::Tanh: {
      const Dual a = eval_dual_node(n->a, x);
      const double t = std::tanh(a.v);
      return {t, (1.0 - t * t) * a.d};
    }
    case Kind::Sin: {
      const Dual a = eval_dual_node(n->a, x);
      return {std::sin(a.v), std::cos(a.v) * a.d};
    }
    case Kind::Cos: {
      const Dual a = eval_dual_node(n->a, x);
      return {std::cos(a.v), -std::sin(a.v) * a.d};
    }
    case Kind::Sqrt: {
      const Dual a = eval_dual_node(n->a, x);
      const double s = std::sqrt(a.v);
      return {s, a.d / (2.0 * s)};
    }
  }
  return {};
}

// ---- signed log arithmetic ------------------------------------------------

struct SL {
  double l;
  int s;
};

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

SL sl_from(double v) { return v == 0.0 ? SL{kNegInf, 0} : SL{std::log(std::fabs(v)), sign_of(v)}; }

double ladd(double a, double b) {
  if (a == kNegInf || b == kNegInf) return kNegInf;
  return a + b;
}

SL sl_sum(SL x, SL y) {
  if (x.s == 0) return y;
  if (y.s == 0) return x;
  const double m = std::max(x.l, y.l);
  if (std::isinf(m) && m > 0) {
    if (x.l == y.l && x.s != y.s) return {std::numeric_limits<double>::quiet_NaN(), 0};
    return {m, x.l >= y.l ? x.s : y.s};
  }
  const double v = x.s * std::exp(x.l - m) + y.s * std::exp(y.l - m);
  if (v == 0.0) return {kNegInf, 0};
  return {m + std::log(std::fabs(v)), sign_of(v)};
}

SL sl_mul(SL x, SL y) {
  if (x.s == 0 || y.s == 0) return {kNegInf, 0};
  return {x.l + y.l, x.s * y.s};
}

LogDual ld_make(SL v, SL d) { return LogDual{v.l, v.s, d.l, d.s}; }
SL val(const LogDual& a) { return {a.lv, a.sv}; }
SL der(const LogDual& a) { return {a.ld, a.sd}; }

double log_sinh_abs(double ax) {
  if (ax > 20.0) return ax - kLn2 + std::log1p(-std::exp(-2.0 * ax));
  return std::log(std::sinh(ax));
}
double log_cosh(double x) {
  const double ax = std::fabs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - kLn2;
}

LogDual ld_exp(const LogDual& u) {
  const double x = u.value();
  if (std::isnan(x)) return ld_make({x, 0}, {x, 0});
  if (x == kNegInf) return ld_make({kNegInf, 0}, {kNegInf, 0});
  return ld_make({x, 1}, {ladd(x, u.ld), u.sd});
}

LogDual ld_log(const LogDual& u) {
  if (u.sv <= 0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return ld_make({nan, 0}, {nan, 0});
  }
  return ld_make(sl_from(u.lv), {u.sd == 0 ? kNegInf : u.ld - u.lv, u.sd});
}

LogDual ld_pow_const(const LogDual& a, double c) {
  if (c == 0.0) return ld_make({0.0, 1}, {kNegInf, 0});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  int sign = 1;
  if (a.sv < 0) {
    if (std::floor(c) != c) return ld_make({nan, 0}, {nan, 0});
    sign = (static_cast<long long>(c) % 2 == 0) ? 1 : -1;
  }
  if (a.sv == 0) {
    if (c < 0.0) return ld_make({nan, 0}, {nan, 0});
    SL d{kNegInf, 0};
    if (c == 1.0) d = der(a);
    else if (c < 1.0 && a.sd != 0) return ld_make({kNegInf, 0}, {nan, 0});
    return ld_make({kNegInf, 0}, d);
  }
  const SL v{c * a.lv, sign};
  // d/dx a^c = c a^(c-1) a'
  SL d{kNegInf, 0};
  if (a.sd != 0) {
    const int s_pow_m1 = (a.sv < 0 && (static_cast<long long>(c - 1.0) % 2 != 0)) ? -1 : 1;
    d = SL{std::log(std::fabs(c)) + (c - 1.0) * a.lv + a.ld, sign_of(c) * s_pow_m1 * a.sd};
  }
  return ld_make(v, d);
}

LogDual eval_log_node(const NodePtr& n, double x) {
  switch (n->kind) {
    case Kind::Const: return ld_make(sl_from(n->c), {kNegInf, 0});
    case Kind::Var: return ld_make(sl_from(x), {0.0, 1});
    case Kind::Neg: {
      LogDual a = eval_log_node(n->a, x);
      a.sv = -a.sv;
      a.sd = -a.sd;
      return a;
    }
    case Kind::Add: {
      const LogDual a = eval_log_node(n->a, x), b = eval_log_node(n->b, x);
      return ld_make(sl_sum(val(a), val(b)), sl_sum(der(a), der(b)));
    }
    case Kind::Sub: {
      const LogDual a = eval_log_node(n->a, x), b = eval_log_node(n->b, x);
      return ld_make(sl_sum(val(a), {b.lv, -b.sv}), sl_sum(der(a), {b.ld, -b.sd}));
    }
    case Kind::Mul: {
      const LogDual a = eval_log_node(n->a, x), b = eval_log_node(n->b, x);
      return ld_make(sl_mul(val(a), val(b)), sl_sum(sl_mul(der(a), val(b)), sl_mul(val(a), der(b))));
    }
    case Kind::Div: {
      const LogDual a = eval_log_node(n->a, x), b = eval_log_node(n->b, x);
      if (b.sv == 0) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return ld_make({nan, 0}, {nan, 0});
      }
      const SL v{a.sv == 0 ? kNegInf : a.lv - b.lv, a.sv * b.sv};
      SL num = sl_sum(sl_mul(der(a), val(b)), sl_mul(val(a), {b.ld, -b.sd}));
      const SL d{num.s == 0 ? kNegInf : num.l - 2.0 * b.lv, num.s};
      return ld_make(v, d);
    }
    case Kind::Pow: {
      const LogDual a = eval_log_node(n->a, x);
      if (n->b->kind == Kind::Const) return ld_pow_const(a, n->b->c);
      const LogDual b = eval_log_node(n->b, x);
      const LogDual la = ld_log(a);
      const LogDual prod = ld_make(sl_mul(val(b), val(la)), sl_sum(sl_mul(der(b), val(la)), sl_mul(val(b), der(la))));
      return ld_exp(prod);
    }
    case Kind::Exp: return ld_exp(eval_log_node(n->a, x));
    case Kind::Log: return ld_log(eval_log_node(n->a, x));
    case Kind::Sinh: {
      const LogDual u = eval_log_node(n->a, x);
      const double v = u.value();
      const SL s = v == 0.0 ? SL{kNegInf, 0} : SL{log_sinh_abs(std::fabs(v)), sign_of(v)};
      return ld_make(s, sl_mul({log_cosh(v), 1}, der(u)));
    }
    case Kind::Cosh: {
      const LogDual u = eval_log_node(n->a, x);
      const double v = u.value();
      const SL sh = v == 0.0 ? SL{kNegInf, 0} : SL{log_sinh_abs(std::fabs(v)), sign_of(v)};
      return ld_make({log_cosh(v), 1}, sl_mul(sh, der(u)));
    }
    case Kind::Tanh: {
      const LogDual u = eval_log_node(n->a, x);
      const double v = u.value();
      return ld_make(sl_from(std::tanh(v)), sl_mul({-2.0 * log_cosh(v), 1}, der(u)));
    }
    case Kind::Sin: {
      const LogDual u = eval_log_node(n->a, x);
      const double v = u.value();
      return ld_make(sl_from(std::sin(v)), sl_mul(sl_from(std::cos(v)), der(u)));
    }
    case Kind::Cos: {
      const LogDual u = eval_log_node(n->a, x);
      const double v = u.value();
      return ld_make(sl_from(std::cos(v)), sl_mul(sl_from(-std::sin(v)), der(u)));
    }
    case Kind::Sqrt: return ld_pow_const(eval_log_node(n->a, x), 0.5);
  }
  return {};
}

NodePtr derive(const NodePtr& n) {
  switch (n->kind) {
    case Kind::Const: return make_const(0.0);
    case Kind::Var: return make_const(1.0);
    case Kind::Neg: return neg(derive(n->a));
    case Kind::Add: return add(derive(n->a), derive(n->b));
    case Kind::Sub: return sub(derive(n->a), derive(n->b));
    case Kind::Mul: return add(mul(derive(n->a), n->b), mul(n->a, derive(n->b)));
    case Kind::Div:
      return div(sub(mul(derive(n->a), n->b), mul(n->a, derive(n->b))), powr(n->b, make_const(2.0)));
    case Kind::Pow: {
      if (n->b->kind == Kind::Const) {
        const double c = n->b->c;
        return mul(mul(make_const(c), powr(n->a, make_const(c - 1.0))), derive(n->a));
      }
      // (a^b)' = a^b (b' log a + b a'/a)
      return mul(n, add(mul(derive(n->b), unary(Kind::Log, n->a)), div(mul(n->b, derive(n->a)), n->a)));
    }
    case Kind::Exp: return mul(n, derive(n->a));
    case Kind::Log: return div(derive(n->a), n->a);
    case Kind::Sinh: return mul(unary(Kind::Cosh, n->a), derive(n->a));
    case Kind::Cosh: return mul(unary(Kind::Sinh, n->a), derive(n->a));
    case Kind::Tanh:
      return mul(powr(unary(Kind::Cosh, n->a), make_const(-2.0)), derive(n->a));
    case Kind::Sin: return mul(unary(Kind::Cos, n->a), derive(n->a));
    case Kind::Cos: return neg(mul(unary(Kind::Sin, n->a), derive(n->a)));
    case Kind::Sqrt: return div(derive(n->a), mul(make_const(2.0), n));
  }
  return nullptr;
}

NodePtr substitute(const NodePtr& n, const NodePtr& inner) {
  switch (n->kind) {
    case Kind::Const: return n;
    case Kind::Var: return inner;
    default: break;
  }
  NodePtr a = n->a ? substitute(n->a, inner) : nullptr;
  NodePtr b = n->b ? substitute(n->b, inner) : nullptr;
  return fold(make(n->kind, std::move(a), std::move(b), n->c));
}

const char* func_name(Kind k) {
  switch (k) {
    case Kind::Exp: return "exp";
    case Kind::Log: return "log";
    case Kind::Sinh: return "sinh";
    case Kind::Cosh: return "cosh";
    case Kind::Tanh: return "tanh";
    case Kind::Sin: return "sin";
    case Kind::Cos: return "cos";
    case Kind::Sqrt: return "sqrt";
    default: return "?";
  }
}

void print(std::ostream& os, const NodePtr& n, const std::string& var) {
  switch (n->kind) {
    case Kind::Const: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << n->c;
      if (n->c < 0) os << '(' << tmp.str() << ')';
      else os << tmp.str();
      return;
    }
    case Kind::Var: os << var; return;
    case Kind::Neg: os << "(-"; print(os, n->a, var); os << ')'; return;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div:
    case Kind::Pow: {
      const char op = n->kind == Kind::Add ? '+' : n->kind == Kind::Sub ? '-' : n->kind == Kind::Mul ? '*'
                    : n->kind == Kind::Div ? '/' : '^';
      os << '(';
      print(os, n->a, var);
      os << op;
      print(os, n->b, var);
      os << ')';
      return;
    }
    default:
      os << func_name(n->kind) << '(';
      print(os, n->a, var);
      os << ')';
  }
}

// ---- parser ---------------------------------------------------------------

struct Token {
  enum Type { Number, Ident, Op, End } type;
  std::string text;
  double number = 0.0;
  std::size_t pos = 0;
};

class Parser {
 public:
  Parser(std::string_view src, std::string_view var, const ParamTable& params)
      : src_(src), var_(var), params_(params) {
    advance();
  }

  NodePtr parse_all() {
    NodePtr e = expr();
    if (tok_.type != Token::End) throw ParseError("unexpected trailing input", tok_.text, tok_.pos);
    return e;
  }

 private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    tok_ = Token{Token::End, "<end>", 0.0, i_};
    if (i_ >= src_.size()) return;
    const char ch = src_[i_];
    const std::size_t start = i_;
    if (std::isdigit(static_cast<unsigned char>(ch)) || (ch == '.' && i_ + 1 < src_.size() &&
                                                         std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
      if (i_ < src_.size() && src_[i_] == '.') {
        ++i_;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
      }
      if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
        std::size_t j = i_ + 1;
        if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
        if (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) {
          i_ = j;
          while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
        }
      }
      const std::string text(src_.substr(start, i_ - start));
      tok_ = Token{Token::Number, text, std::stod(text), start};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      while (i_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
        ++i_;
      tok_ = Token{Token::Ident, std::string(src_.substr(start, i_ - start)), 0.0, start};
      return;
    }
    if (std::string_view("+-*/^(),").find(ch) != std::string_view::npos) {
      ++i_;
      tok_ = Token{Token::Op, std::string(1, ch), 0.0, start};
      return;
    }
    throw ParseError("unexpected character", std::string(1, ch), start);
  }

  bool is_op(char c) const { return tok_.type == Token::Op && tok_.text[0] == c; }

  void expect(char c) {
    if (!is_op(c)) throw ParseError(std::string("expected '") + c + "'", tok_.text, tok_.pos);
    advance();
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (is_op('+') || is_op('-')) {
      const bool plus = is_op('+');
      advance();
      NodePtr rhs = term();
      lhs = plus ? add(lhs, rhs) : sub(lhs, rhs);
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary_expr();
    while (is_op('*') || is_op('/')) {
      const bool times = is_op('*');
      advance();
      NodePtr rhs = unary_expr();
      lhs = times ? mul(lhs, rhs) : div(lhs, rhs);
    }
    return lhs;
  }

  NodePtr unary_expr() {
    if (is_op('-')) {
      advance();
      return neg(unary_expr());
    }
    if (is_op('+')) {
      advance();
      return unary_expr();
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (is_op('^')) {
      advance();
      return powr(base, unary_expr());
    }
    return base;
  }

  NodePtr primary() {
    if (tok_.type == Token::Number) {
      const double v = tok_.number;
      advance();
      return make_const(v);
    }
    if (is_op('(')) {
      advance();
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (tok_.type == Token::Ident) {
      const Token id = tok_;
      advance();
      if (is_op('(')) return call(id);
      if (id.text == var_) return make(Kind::Var);
      if (auto it = params_.find(id.text); it != params_.end()) return make_const(it->second);
      if (id.text == "pi") return make_const(3.14159265358979323846);
      if (id.text == "e") return make_const(2.71828182845904523536);
      throw ParseError("unknown identifier", id.text, id.pos);
    }
    throw ParseError(tok_.type == Token::End ? "unexpected end of formula" : "unexpected token", tok_.text,
                     tok_.pos);
  }

  NodePtr call(const Token& id) {
    advance();  // '('
    std::vector<NodePtr> args;
    args.push_back(expr());
    while (is_op(',')) {
      advance();
      args.push_back(expr());
    }
    expect(')');
    static const std::pair<const char*, Kind> unary_funcs[] = {
        {"exp", Kind::Exp},   {"log", Kind::Log}, {"sinh", Kind::Sinh}, {"cosh", Kind::Cosh},
        {"tanh", Kind::Tanh}, {"sin", Kind::Sin}, {"cos", Kind::Cos},   {"sqrt", Kind::Sqrt}};
    for (const auto& [name, kind] : unary_funcs) {
      if (id.text == name) {
        if (args.size() != 1) throw ParseError("function takes one argument", id.text, id.pos);
        return unary(kind, args[0]);
      }
    }
    if (id.text == "pow") {
      if (args.size() != 2) throw ParseError("pow takes two arguments", id.text, id.pos);
      return powr(args[0], args[1]);
    }
    throw ParseError("unknown function", id.text, id.pos);
  }

  std::string_view src_;
  std::string_view var_;
  const ParamTable& params_;
  std::size_t i_ = 0;
  Token tok_;
};

}  // namespace

double LogDual::value() const { return sv == 0 ? 0.0 : sv * std::exp(lv); }
double LogDual::derivative() const { return sd == 0 ? 0.0 : sd * std::exp(ld); }
double LogDual::log_derivative() const {
  if (sd == 0) return 0.0;
  return sd * sv * std::exp(ld - lv);
}

Expr Expr::constant(double c) { return Expr(make_const(c)); }
Expr Expr::variable() { return Expr(make(Kind::Var)); }

Expr Expr::parse(std::string_view text, std::string_view var, const ParamTable& params) {
  Parser p(text, var, params);
  return Expr(p.parse_all());
}

bool Expr::is_constant() const { return node_ && node_->kind == Kind::Const; }
double Expr::constant_value() const { return node_->c; }

double Expr::eval(double x) const { return eval_plain(node_, x); }
Dual Expr::eval_dual(double x) const { return eval_dual_node(node_, x); }
LogDual Expr::eval_log(double x) const { return eval_log_node(node_, x); }

Expr Expr::derivative() const { return Expr(derive(node_)); }
Expr Expr::compose(const Expr& inner) const { return Expr(substitute(node_, inner.node_)); }

std::string Expr::to_string() const {
  std::ostringstream os;
  print(os, node_, "x");
  return os.str();
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(add(a.node_, b.node_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(sub(a.node_, b.node_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(mul(a.node_, b.node_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(div(a.node_, b.node_)); }
Expr operator-(const Expr& a) { return Expr(neg(a.node_)); }
Expr pow(const Expr& a, const Expr& b) { return Expr(powr(a.node_, b.node_)); }
Expr exp(const Expr& a) { return Expr(unary(Kind::Exp, a.node_)); }
Expr log(const Expr& a) { return Expr(unary(Kind::Log, a.node_)); }

}  // namespace feller
