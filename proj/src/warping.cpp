#include "feller/warping.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "feller/error.hpp"

namespace feller {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LogJet expr_jet(const Expr& g, const Expr& dg, double r) {
  if (r < 0.0) throw Error(ErrorCode::DomainExceeded, "negative radius " + std::to_string(r));
  const LogDual a = g.eval_log(r);
  if (a.sv == 0 && r == 0.0) return {-kInf, kInf, -kInf};
  if (a.sv <= 0 || std::isnan(a.lv))
    throw Error(ErrorCode::NonPositiveValue, "g(" + std::to_string(r) + ") <= 0 for " + g.to_string());
  const LogDual b = dg.eval_log(r);
  if (std::isnan(b.lv) || std::isnan(b.ld) || std::isinf(a.lv))
    throw Error(ErrorCode::EvaluationFailure, "cannot evaluate " + g.to_string() + " at r = " + std::to_string(r));
  const double d1 = b.sv == 0 ? 0.0 : b.sv * std::exp(b.lv - a.lv);
  const double g2 = b.sd == 0 ? 0.0 : b.sd * std::exp(b.ld - a.lv);
  const LogJet j{a.lv, d1, g2 - d1 * d1};
  if (!std::isfinite(j.d1) || !std::isfinite(j.d2))
    throw Error(ErrorCode::EvaluationFailure, "derivative of " + g.to_string() + " overflows at r = " +
                                                  std::to_string(r));
  return j;
}

// Cubic Hermite interpolation of q = log(g/r) on positive nodes.
struct Table {
  std::vector<double> r, q, s;
  double c = 0.0;  // q = q(0) + c r^2 below the first node

  LogJet at(double x) const {
    double qv, qd, qdd;
    if (x <= r.front()) {
      // Even extension toward the pole: q(x) = q0 + c (x^2 - r0^2).
      qv = q.front() + c * (x * x - r.front() * r.front());
      qd = 2.0 * c * x;
      qdd = 2.0 * c;
    } else {
      auto it = std::upper_bound(r.begin(), r.end(), x);
      std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
      if (i >= r.size() - 1) i = r.size() - 2;
      const double h = r[i + 1] - r[i];
      const double t = (x - r[i]) / h;
      const double t2 = t * t, t3 = t2 * t;
      qv = (2 * t3 - 3 * t2 + 1) * q[i] + (t3 - 2 * t2 + t) * h * s[i] + (-2 * t3 + 3 * t2) * q[i + 1] +
           (t3 - t2) * h * s[i + 1];
      qd = ((6 * t2 - 6 * t) * q[i] + (-6 * t2 + 6 * t) * q[i + 1]) / h + (3 * t2 - 4 * t + 1) * s[i] +
           (3 * t2 - 2 * t) * s[i + 1];
      qdd = ((12 * t - 6) * q[i] + (-12 * t + 6) * q[i + 1]) / (h * h) + ((6 * t - 4) * s[i] + (6 * t - 2) * s[i + 1]) / h;
    }
    if (x == 0.0) return {-kInf, kInf, -kInf};
    return {std::log(x) + qv, 1.0 / x + qd, -1.0 / (x * x) + qdd};
  }
};

std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> delta(n - 1), m(n);
  for (std::size_t k = 0; k + 1 < n; ++k) delta[k] = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
  m[0] = delta[0];
  m[n - 1] = delta[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) {
      m[k] = 0.0;
      continue;
    }
    const double h0 = x[k] - x[k - 1], h1 = x[k + 1] - x[k];
    m[k] = 3.0 * (h0 + h1) / ((2.0 * h1 + h0) / delta[k - 1] + (h1 + 2.0 * h0) / delta[k]);
  }
  return m;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

WarpingSource WarpingSource::from_expr(const Expr& g) {
  WarpingSource s;
  const Expr dg = g.derivative();
  s.fn_ = [g, dg](double r) { return expr_jet(g, dg, r); };
  s.expr_ = g;
  s.at_zero_ = [g] { return g.eval(0.0); };
  s.description_ = g.to_string();
  return s;
}

WarpingSource WarpingSource::from_formula(std::string_view formula, const ParamTable& params) {
  WarpingSource s = from_expr(Expr::parse(formula, "r", params));
  s.description_ = std::string(formula);
  return s;
}

WarpingSource WarpingSource::from_table(std::vector<double> r, std::vector<double> g, std::vector<double> dg) {
  if (r.size() != g.size() || (!dg.empty() && dg.size() != r.size()))
    throw Error(ErrorCode::ValidationError, "table columns have different lengths");
  auto t = std::make_shared<Table>();
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] <= 0.0) continue;
    if (!(g[i] > 0.0)) throw Error(ErrorCode::NonPositiveValue, "table value g(" + fmt(r[i]) + ") <= 0");
    if (!t->r.empty() && !(r[i] > t->r.back()))
      throw Error(ErrorCode::ValidationError, "table radii must be strictly increasing");
    t->r.push_back(r[i]);
    t->q.push_back(std::log(g[i] / r[i]));
    if (!dg.empty()) t->s.push_back(dg[i] / g[i] - 1.0 / r[i]);
  }
  if (t->r.size() < 2) throw Error(ErrorCode::ValidationError, "table needs at least two positive radii");
  if (dg.empty()) {
    // Without slopes, the even extension is fitted through the first two
    // nodes and fixes the first slope; one-sided differences would bias g'(0).
    t->s = monotone_slopes(t->r, t->q);
    t->c = (t->q[1] - t->q[0]) / (t->r[1] * t->r[1] - t->r[0] * t->r[0]);
    t->s[0] = 2.0 * t->c * t->r[0];
  } else {
    t->c = t->s[0] / (2.0 * t->r[0]);
  }
  WarpingSource s;
  const double r_max = t->r.back();
  s.fn_ = [t, r_max](double x) {
    if (x < 0.0 || x > r_max)
      throw Error(ErrorCode::DomainExceeded, "r = " + fmt(x) + " outside table range [0, " + fmt(r_max) + "]");
    return t->at(x);
  };
  s.at_zero_ = [] { return 0.0; };
  s.r_max_ = r_max;
  s.description_ = "table(" + std::to_string(t->r.size()) + " nodes, r <= " + fmt(r_max) + ")";
  return s;
}

WarpingSource WarpingSource::from_callable(JetFn fn, std::string description, double r_max) {
  WarpingSource s;
  s.fn_ = std::move(fn);
  s.at_zero_ = [f = s.fn_] {
    const LogJet j = f(0.0);
    return j.l == -kInf ? 0.0 : std::exp(j.l);
  };
  s.r_max_ = r_max;
  s.description_ = std::move(description);
  return s;
}

LogJet WarpingSource::jet(double r) const {
  if (r > r_max_) throw Error(ErrorCode::DomainExceeded, "r = " + fmt(r) + " beyond " + description_);
  return fn_(r);
}

double WarpingSource::value_at_zero() const { return at_zero_(); }

WarpingFunction::WarpingFunction(WarpingSource body) : body_(std::move(body)) {}

WarpingFunction::WarpingFunction(WarpingSource body, WarpingSource tail, double r_a, double r_b)
    : body_(std::move(body)), tail_(std::make_shared<const WarpingSource>(std::move(tail))), r_a_(r_a), r_b_(r_b) {
  if (!(r_a > 0.0 && r_b > r_a))
    throw Error(ErrorCode::ValidationError, "blend window must satisfy 0 < r_a < r_b");
}

WarpingFunction WarpingFunction::parse(std::string_view formula, const ParamTable& params) {
  return WarpingFunction(WarpingSource::from_formula(formula, params));
}

WarpingFunction WarpingFunction::spliced(std::string_view body, std::string_view tail, double r_a, double r_b,
                                         const ParamTable& params) {
  return WarpingFunction(WarpingSource::from_formula(body, params), WarpingSource::from_formula(tail, params), r_a,
                         r_b);
}

LogJet WarpingFunction::jet(double r) const {
  if (r < 0.0) throw Error(ErrorCode::DomainExceeded, "negative radius " + fmt(r));
  if (!tail_ || r <= r_a_) return body_.jet(r);
  if (r >= r_b_) return tail_->jet(r);
  const LogJet b = body_.jet(r);
  const LogJet t = tail_->jet(r);
  const double len = r_b_ - r_a_;
  const double tau = (r - r_a_) / len;
  const double s = tau * tau * (3.0 - 2.0 * tau);
  const double s1 = 6.0 * tau * (1.0 - tau) / len;
  const double s2 = (6.0 - 12.0 * tau) / (len * len);
  const double dl = t.l - b.l;
  return {(1.0 - s) * b.l + s * t.l, (1.0 - s) * b.d1 + s * t.d1 + s1 * dl,
          (1.0 - s) * b.d2 + s * t.d2 + 2.0 * s1 * (t.d1 - b.d1) + s2 * dl};
}

LogEval WarpingFunction::eval_log(double r) const {
  const LogJet j = jet(r);
  return {j.l, j.d1, std::isfinite(j.l) && std::fabs(j.l) < 700.0};
}

double WarpingFunction::derivative(double r) const {
  const LogJet j = jet(r);
  return std::exp(j.l) * j.d1;
}

double WarpingFunction::horizon() const noexcept { return tail_ ? tail_->r_max() : body_.r_max(); }

std::string WarpingFunction::describe() const {
  if (!tail_) return body_.description();
  return "blend(" + body_.description() + ", " + tail_->description() + "; [" + fmt(r_a_) + ", " + fmt(r_b_) + "])";
}

WarpingFunction WarpingFunction::with_window(double r_a, double r_b) const {
  if (!tail_) return *this;
  return WarpingFunction(body_, *tail_, r_a, r_b);
}

double ModelManifold::log_sphere_constant() const { return std::log(sphere_constant(m_)); }

double sphere_constant(int m) {
  if (m < 1) throw Error(ErrorCode::ValidationError, "dimension must be positive");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

ModelManifold make_model(int m, WarpingFunction g, double pole_eps) {
  if (m < 2) throw Error(ErrorCode::ValidationError, "dimension m must be >= 2, got " + std::to_string(m));
  if (!(pole_eps > 0.0 && pole_eps < 0.1)) throw Error(ErrorCode::ValidationError, "pole_eps must lie in (0, 0.1)");

  const double g0 = g.value_at_zero();
  if (!(std::fabs(g0) <= 1e-8)) throw Error(ErrorCode::PoleViolation, "g(0) = " + fmt(g0) + " != 0");

  // g' is even at the pole, so two samples cancel the quadratic term.
  double gp0;
  try {
    const double a = g.derivative(pole_eps), b = g.derivative(0.5 * pole_eps);
    gp0 = (4.0 * b - a) / 3.0;
  } catch (const Error& e) {
    throw Error(ErrorCode::PoleViolation, std::string("g is not evaluable near the pole: ") + e.what());
  }
  if (!(std::fabs(gp0 - 1.0) <= 1e-6)) throw Error(ErrorCode::PoleViolation, "g'(0) = " + fmt(gp0) + " != 1");
  const double ratio = std::exp(g.log_g(pole_eps)) / pole_eps;
  if (!(std::fabs(ratio - 1.0) <= 1e-4))
    throw Error(ErrorCode::PoleViolation, "g(eps)/eps = " + fmt(ratio) + " at eps = " + fmt(pole_eps));

  const double r_hi = std::min(g.horizon(), 256.0);
  const int samples = 400;
  std::vector<double> radii;
  for (int i = 0; i <= samples; ++i) radii.push_back(pole_eps * std::pow(r_hi / pole_eps, double(i) / samples));
  if (g.has_tail()) {
    radii.push_back(g.blend_start());
    radii.push_back(0.5 * (g.blend_start() + g.blend_end()));
    radii.push_back(g.blend_end());
  }
  for (double r : radii) {
    if (r > g.horizon()) continue;
    try {
      const LogJet j = g.jet(r);
      if (std::isnan(j.l) || j.l == -kInf) throw Error(ErrorCode::NonPositiveValue, "g vanishes");
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DomainExceeded) continue;
      throw Error(ErrorCode::NonPositive, "g fails positivity at r = " + fmt(r) + " (" + e.what() + ")");
    }
  }
  return ModelManifold(m, std::move(g), pole_eps);
}

WarpingSource load_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ValidationError, "cannot open table " + path);
  std::vector<double> r, g;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a >> b)) {
      if (r.empty() && lineno == 1) continue;  // header
      throw Error(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": expected two numbers");
    }
    r.push_back(a);
    g.push_back(b);
  }
  return WarpingSource::from_table(std::move(r), std::move(g));
}

}  // namespace feller
