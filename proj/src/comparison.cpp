#include "feller/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "feller/classifier.hpp"
#include "feller/error.hpp"
#include "feller/fv.hpp"
#include "feller/ode.hpp"
#include "feller/quadrature.hpp"

namespace feller {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// log(g / r) and two derivatives at the Jacobi samples.
struct JacobiTable {
  std::vector<double> r, q, dq, d2q;
  double G0 = 0.0;
};

// Quintic Hermite interpolation of q between samples.
LogJet table_jet(const JacobiTable& T, double x) {
  double q, dq, d2q;
  if (x <= T.r.front()) {
    q = -T.G0 * x * x / 6;
    dq = -T.G0 * x / 3;
    d2q = -T.G0 / 3;
  } else {
    const auto it = std::upper_bound(T.r.begin(), T.r.end(), x);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - T.r.begin()), T.r.size() - 1) - 1;
    const double h = T.r[i + 1] - T.r[i], t = (x - T.r[i]) / h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double H[6] = {1 - 10 * t3 + 15 * t4 - 6 * t5, t - 6 * t3 + 8 * t4 - 3 * t5,
                         (t2 - 3 * t3 + 3 * t4 - t5) / 2, (t3 - 2 * t4 + t5) / 2,
                         -4 * t3 + 7 * t4 - 3 * t5,     10 * t3 - 15 * t4 + 6 * t5};
    const double D[6] = {-30 * t2 + 60 * t3 - 30 * t4, 1 - 18 * t2 + 32 * t3 - 15 * t4,
                         (2 * t - 9 * t2 + 12 * t3 - 5 * t4) / 2, (3 * t2 - 8 * t3 + 5 * t4) / 2,
                         -12 * t2 + 28 * t3 - 15 * t4,   30 * t2 - 60 * t3 + 30 * t4};
    const double S[6] = {-60 * t + 180 * t2 - 120 * t3, -36 * t + 96 * t2 - 60 * t3,
                         (2 - 18 * t + 36 * t2 - 20 * t3) / 2, (6 * t - 24 * t2 + 20 * t3) / 2,
                         -24 * t + 84 * t2 - 60 * t3,   60 * t - 180 * t2 + 120 * t3};
    const double c[6] = {T.q[i], h * T.dq[i], h * h * T.d2q[i], h * h * T.d2q[i + 1], h * T.dq[i + 1], T.q[i + 1]};
    q = dq = d2q = 0.0;
    for (int k = 0; k < 6; ++k) {
      q += c[k] * H[k];
      dq += c[k] * D[k];
      d2q += c[k] * S[k];
    }
    dq /= h;
    d2q /= h * h;
  }
  if (x == 0.0) return {-kInf, kInf, -kInf};
  return {q + std::log(x), dq + 1 / x, d2q - 1 / (x * x)};
}

double locate_zero(const Rhs2& f, OdeSample lo, double hi, const JacobiOptions& o) {
  OdeOptions oo;
  oo.rtol = o.rtol;
  oo.atol = 1e-300;
  oo.max_step = o.max_step;
  while (hi - lo.t > o.zero_tolerance) {
    const double mid = 0.5 * (lo.t + hi);
    oo.initial_step = std::min(1e-4, 0.25 * (mid - lo.t));
    const auto path = integrate_dopri5(f, lo.t, lo.y, mid, oo);
    if (path.back().y[0] > 0.0) lo = path.back();
    else hi = mid;
  }
  return 0.5 * (lo.t + hi);
}

std::shared_ptr<JacobiTable> integrate_jacobi(const RadialFunction& G, const JacobiOptions& o, double r_end) {
  auto T = std::make_shared<JacobiTable>();
  T->G0 = G(0.0);
  const double r0 = o.start;
  State2 y{r0 - T->G0 * r0 * r0 * r0 / 6, 1 - T->G0 * r0 * r0 / 2};
  double L = 0.0;  // g = e^L y[0]
  const Rhs2 rhs = [&G](double t, const State2& s) -> State2 { return {s[1], -G(t) * s[0]}; };
  auto record = [&](double t, const State2& s) {
    const double yy = s[1] / s[0];
    const double Gt = G(t);
    if (!std::isfinite(Gt)) throw Error(ErrorCode::EvaluationFailure, "G(" + fmt(t) + ") is not finite");
    T->r.push_back(t);
    T->q.push_back(L + std::log(s[0]) - std::log(t));
    T->dq.push_back(yy - 1 / t);
    T->d2q.push_back(-Gt - yy * yy + 1 / (t * t));
  };
  record(r0, y);
  OdeOptions oo;
  oo.rtol = o.rtol;
  oo.atol = 1e-300;
  oo.max_step = o.max_step;
  double a = r0;
  while (a < r_end) {
    const double b = std::min(r_end, std::floor(a) + 1.0);
    const double s = std::max(std::fabs(y[0]), std::fabs(y[1]));
    L += std::log(s);
    y = {y[0] / s, y[1] / s};
    const auto path = integrate_dopri5(rhs, a, y, b, oo, [](const OdeSample& p) { return p.y[0] <= 0.0; });
    for (std::size_t k = 1; k < path.size(); ++k) {
      if (path[k].y[0] <= 0.0) {
        OdeSample lo = path[k - 1];
        throw ConjugatePointError(locate_zero(rhs, lo, path[k].t, o));
      }
      record(path[k].t, path[k].y);
    }
    y = path.back().y;
    a = path.back().t;
    oo.initial_step = std::min(oo.max_step, std::max(1e-6, path.size() > 1 ? path.back().t - path[path.size() - 2].t : 1e-4));
  }
  return T;
}

std::shared_ptr<const Expr> shared_expr(const Expr& e) { return std::make_shared<const Expr>(e); }

double sampled_log_g(const Expr& G, double r) {
  const LogDual d = G.eval_log(r);
  if (d.sv <= 0) throw Error(ErrorCode::HypothesisFailure, "G(" + fmt(r) + ") is not positive");
  return d.lv;
}

std::vector<double> sample_radii(double hi, std::size_t n) {
  std::vector<double> r{0.0};
  for (std::size_t k = 0; k < n; ++k) r.push_back(std::ldexp(1.0, -6) * std::pow(hi * 64, double(k) / (n - 1)));
  return r;
}

// Positive and nondecreasing on a geometric sample of [0, hi].
std::string monotone_defect(const Expr& G, double hi) {
  double prev = -kInf;
  for (double r : sample_radii(hi, 400)) {
    const double v = G.eval(r);
    if (!(v > 0.0)) return "G(" + fmt(r) + ") = " + fmt(v) + " is not positive";
    if (v < prev * (1 - 1e-12)) return "G decreases near r = " + fmt(r);
    prev = v;
  }
  return {};
}

}  // namespace

const char* to_string(BoundKind k) noexcept {
  return k == BoundKind::SectionalUpper ? "sectional_upper" : "ricci_lower";
}

CurvatureBound CurvatureBound::parse(std::string_view formula, BoundKind kind, int m, const ParamTable& params) {
  if (m < 2) throw Error(ErrorCode::ValidationError, "dimension must be at least 2");
  return CurvatureBound{Expr::parse(formula, "r", params), kind, m, std::string(formula)};
}

ModelManifold jacobi_model(const RadialFunction& G, int m, const JacobiOptions& o) {
  const bool tail = o.declared_tail.has_value() && o.tail_from > o.start;
  const double r_end = tail ? o.tail_from : o.r_max;
  const auto T = integrate_jacobi(G, o, r_end);
  const double t_end = T->r.back();
  WarpingSource::JetFn fn = [T, t_end](double x) {
    if (x > t_end * (1 + 1e-14)) throw Error(ErrorCode::DomainExceeded, "r = " + fmt(x) + " past the Jacobi table");
    return table_jet(*T, std::min(x, t_end));
  };
  if (tail) {
    const LogJet at = table_jet(*T, t_end);
    const LogJet want = o.declared_tail->jet(t_end);
    const double dv = std::fabs(std::expm1(at.l - want.l));
    const double ds = std::fabs(at.d1 - want.d1) / std::max(1.0, std::fabs(want.d1));
    if (dv > o.tail_match || ds > o.tail_match)
      throw Error(ErrorCode::HypothesisFailure, "declared tail does not continue the Jacobi solution at r = " +
                                                    fmt(t_end) + " (value " + fmt(dv) + ", slope " + fmt(ds) + ")");
    const WarpingSource declared = *o.declared_tail;
    fn = [T, t_end, declared](double x) { return x <= t_end ? table_jet(*T, x) : declared.jet(x); };
    return make_model(m, WarpingFunction(WarpingSource::from_callable(
                             fn, "jacobi to r = " + fmt(t_end) + ", then " + declared.description(),
                             declared.r_max())));
  }
  return make_model(m, WarpingFunction(WarpingSource::from_callable(fn, "jacobi solution", t_end)));
}

ModelManifold jacobi_model(const Expr& G, int m, const JacobiOptions& opts) {
  const auto e = shared_expr(G);
  return jacobi_model([e](double r) { return e->eval(r); }, m, opts);
}

RadialFunction radial_curvature(const WarpingFunction& g) {
  return [g](double r) {
    if (r == 0.0) {
      const double h = 1e-4;
      const LogJet j = g.jet(h);
      return -(j.d2 + j.d1 * j.d1);
    }
    const LogJet j = g.jet(r);
    return -(j.d2 + j.d1 * j.d1);
  };
}

Verdict feller_by_sec_comparison(const Expr& G, int m, const JacobiOptions& opts) {
  const auto e = shared_expr(G);
  return feller_by_sec_comparison([e](double r) { return e->eval(r); }, m, opts);
}

Verdict feller_by_sec_comparison(const RadialFunction& G, int m, const JacobiOptions& opts) {
  const ModelManifold M = jacobi_model(G, m, opts);
  const Verdict model = classify_feller(M);
  Verdict v = model.holds()
                  ? Verdict::make(Truth::Holds, "comparison model is Feller; transfers under Sec_rad <= G with a pole")
                  : Verdict::make(Truth::Inconclusive, std::string("comparison model verdict ") +
                                                            to_string(model.status) + " does not transfer");
  v.evidence = model.evidence;
  return v;
}

Verdict non_feller_by_ric_comparison(const RadialFunction& G, int m, const JacobiOptions& opts) {
  const ModelManifold M = jacobi_model(G, m, opts);
  const Verdict vol = classify_volume_finite(M);
  const Verdict fel = classify_feller(M);
  Verdict v;
  if (vol.holds() && fel.fails()) {
    v = Verdict::make(Truth::Fails, "comparison model has finite volume and is not Feller; transfers under Ric >= (m-1) G");
  } else {
    v = Verdict::make(Truth::Inconclusive, std::string("comparison model: volume_finite ") + to_string(vol.status) +
                                               ", feller " + to_string(fel.status));
  }
  v.evidence = fel.evidence;
  return v;
}

Verdict non_feller_by_ric_comparison(const Expr& G, int m, const JacobiOptions& opts) {
  const auto e = shared_expr(G);
  return non_feller_by_ric_comparison([e](double r) { return e->eval(r); }, m, opts);
}

Verdict apply_bound(const CurvatureBound& b, const JacobiOptions& opts) {
  return b.kind == BoundKind::SectionalUpper ? feller_by_sec_comparison(b.G, b.dim, opts)
                                             : non_feller_by_ric_comparison(b.G, b.dim, opts);
}

Verdict hsu_criterion(const Expr& G, const TailOptions& opts) {
  const std::string defect = monotone_defect(G, 1024.0);
  if (!defect.empty()) return Verdict::make(Truth::Inconclusive, "G is not positive nondecreasing: " + defect);
  const auto e = shared_expr(G);
  const ConvergenceVerdict c = classify_tail(
      [e](double r) {
        const LogDual d = e->eval_log(r);
        if (d.sv <= 0) throw Error(ErrorCode::EvaluationFailure, "G not positive");
        return -d.lv;
      },
      1.0, opts);
  Verdict v;
  if (c.divergent()) v = Verdict::make(Truth::Holds, "1/G is not integrable at infinity");
  else if (c.convergent()) v = Verdict::make(Truth::Inconclusive, "1/G is integrable; the criterion is silent");
  else v = Verdict::make(Truth::Inconclusive, "tail test on 1/G inconclusive: " + c.note);
  v.with("last_log_ratio", c.last_log_ratio);
  if (c.convergent()) v.with("integral_of_inverse_G", c.partial_value);
  return v;
}

bool HsuSharpness::checks_pass() const {
  return curvature_check.holds() && volume_tail.convergent() && ratio_tail.convergent();
}

HsuSharpness hsu_sharpness_model(const Expr& G, double beta, int m, double r_a, double r_b) {
  const std::string defect = monotone_defect(G, 1024.0);
  if (!defect.empty()) throw Error(ErrorCode::HypothesisFailure, "(a) " + defect);
  const auto e = shared_expr(G);
  const auto de = shared_expr(G.derivative());

  // limsup G'/G^2 from the maxima over dyadic windows; the last three count.
  std::vector<double> maxima;
  for (int k = 0; k < 10; ++k) {
    double mx = -kInf;
    for (int j = 0; j <= 64; ++j) {
      const double r = std::ldexp(1.0, k) * (1 + j / 64.0);
      const double gv = e->eval(r);
      mx = std::max(mx, de->eval(r) / (gv * gv));
    }
    if (!std::isfinite(mx)) throw Error(ErrorCode::HypothesisFailure, "(b) G'/G^2 is not finite on the samples");
    maxima.push_back(mx);
  }
  const double alpha = std::max({maxima[7], maxima[8], maxima[9]});
  if (!(beta > alpha))
    throw Error(ErrorCode::HypothesisFailure, "beta = " + fmt(beta) + " does not exceed alpha = " + fmt(alpha));
  const ConvergenceVerdict inv = classify_tail([e](double r) { return -sampled_log_g(*e, r); }, 1.0);
  if (!inv.convergent()) throw Error(ErrorCode::HypothesisFailure, "(c) 1/G is not integrable: " + std::string(to_string(inv.status)));

  // int_0^r G on half-unit panels, extended on demand.
  struct Primitive {
    std::shared_ptr<const Expr> G;
    std::vector<double> at{0.0};
    double operator()(double r) {
      const std::size_t k = static_cast<std::size_t>(r / 0.5);
      while (at.size() <= k) {
        const double a = 0.5 * double(at.size() - 1);
        at.push_back(at.back() + integrate_positive([this](double x) { return G->eval(x); }, a, a + 0.5, 1e-14));
      }
      const double a = 0.5 * double(k);
      return at[k] + (r > a ? integrate_positive([this](double x) { return G->eval(x); }, a, r, 1e-14) : 0.0);
    }
  };
  auto prim = std::make_shared<Primitive>(Primitive{e});
  WarpingSource tail = WarpingSource::from_callable(
      [e, de, prim, beta](double r) {
        return LogJet{-beta * (*prim)(r), -beta * e->eval(r), -beta * de->eval(r)};
      },
      "exp(-" + fmt(beta) + " int_0^r (" + G.to_string() + "))");
  HsuSharpness out(make_model(m, WarpingFunction(WarpingSource::from_formula("r"), tail, r_a, r_b)));
  out.alpha = alpha;
  out.window_maxima = maxima;

  // -g''/g <= -beta (beta - alpha) G^2 over the windows that fixed alpha.
  double worst = -kInf;
  for (int j = 0; j <= 192; ++j) {
    const double r = 128.0 * std::exp2(3.0 * j / 192);
    const LogJet jt = out.model.g().jet(r);
    const double K = -(jt.d2 + jt.d1 * jt.d1);
    const double gv = e->eval(r);
    const double bound = -beta * (beta - alpha) * gv * gv;
    worst = std::max(worst, (K - bound) / std::fabs(bound));
  }
  out.curvature_check = worst <= 1e-9
                            ? Verdict::make(Truth::Holds, "radial curvature below -beta(beta-alpha)G^2 on [128, 1024]")
                            : Verdict::make(Truth::Fails, "radial curvature bound violated on [128, 1024]");
  out.curvature_check.with("worst_relative_excess", worst).with("alpha", alpha);
  const ModelManifold& M = out.model;
  out.volume_tail = classify_tail([&M](double r) { return M.log_w(r); }, 1.0);
  out.ratio_tail = tail_of_volume_ratio(M, RatioDirection::Feller);
  return out;
}

RadialProfile alpha_function(const ModelManifold& M, double r0, double r1, std::size_t samples) {
  if (!(r1 > r0 && r0 > 0.0) || samples < 2) throw Error(ErrorCode::Precondition, "alpha_function needs 0 < r0 < r1");
  // With log w piecewise linear, sigma = int_s^inf w / w(s) obeys a stable
  // backward recursion and its integral over each piece is closed form.
  std::vector<double> R{r0}, L{M.log_w(r0)};
  auto add = [&](double a, double b, double tol) {
    struct Seg { double a, b, la, lb; int depth; };
    std::vector<Seg> stack{{a, b, L.back(), M.log_w(b), 0}};
    while (!stack.empty()) {
      Seg sg = stack.back();
      stack.pop_back();
      const double m = 0.5 * (sg.a + sg.b), lm = M.log_w(m);
      const double noise = 64 * std::numeric_limits<double>::epsilon() * std::max({1.0, std::fabs(sg.la), std::fabs(sg.lb)});
      if (sg.depth < 40 && std::fabs(lm - 0.5 * (sg.la + sg.lb)) > std::max(tol * std::max(1.0, std::fabs(sg.lb - sg.la)), noise)) {
        stack.push_back({m, sg.b, lm, sg.lb, sg.depth + 1});
        stack.push_back({sg.a, m, sg.la, lm, sg.depth + 1});
        continue;
      }
      R.push_back(m);
      L.push_back(lm);
      R.push_back(sg.b);
      L.push_back(sg.lb);
    }
  };
  RadialProfile p;
  p.r.resize(samples);
  p.v.resize(samples);
  std::vector<std::size_t> at(samples, 0);
  for (std::size_t i = 0; i < samples; ++i) p.r[i] = r0 * std::pow(r1 / r0, double(i) / (samples - 1));
  for (std::size_t i = 0; i + 1 < samples; ++i) {
    add(p.r[i], p.r[i + 1], 1e-7);
    at[i + 1] = R.size() - 1;
  }
  std::vector<std::size_t> octave_end;
  double a = r1;
  for (int k = 0;; ++k) {
    add(a, 2 * a, 1e-5);
    a *= 2;
    octave_end.push_back(R.size() - 1);
    if (k >= 6 && L[at.back()] - L.back() > 100) break;
    if (k == 60) throw Error(ErrorCode::EvaluationFailure, "w does not decay fast enough for the alpha function");
  }
  const double slope = M.dlog_w(R.back());
  if (!(slope < 0.0)) throw Error(ErrorCode::EvaluationFailure, "w is not decreasing at the far end");
  const std::size_t N = R.size() - 1;
  std::vector<double> inc(N);
  double sigma = 1.0 / -slope;
  for (std::size_t k = N; k-- > 0;) {
    const double h = R[k + 1] - R[k], D = L[k + 1] - L[k];
    if (D > 700) throw Error(ErrorCode::EvaluationFailure, "w grows too fast near r = " + fmt(R[k]));
    const double e1 = std::fabs(D) < 1e-8 ? 1 + D / 2 : std::expm1(D) / D;
    const double e2 = std::fabs(D) < 1e-4 ? 0.5 + D / 6 : (std::expm1(D) - D) / (D * D);
    inc[k] = h * h * e2 + sigma * h * e1;
    sigma = h * e1 + std::exp(D) * sigma;
  }
  // Octave sums beyond r1; the last octave carries the start-up error of
  // sigma and is replaced by a geometric extrapolation of the previous two.
  std::vector<double> J;
  std::size_t lo = at.back();
  for (std::size_t e : octave_end) {
    double s = 0.0;
    for (std::size_t k = lo; k < e; ++k) s += inc[k];
    J.push_back(s);
    lo = e;
  }
  const std::size_t K = J.size();
  const double rho = J[K - 2] / J[K - 3];
  if (!(rho < 0.95)) throw Error(ErrorCode::EvaluationFailure, "alpha function diverges (octave ratio " + fmt(rho) + ")");
  double u = J[K - 2] * rho / (1 - rho);
  for (std::size_t k = 0; k + 1 < K; ++k) u += J[k];
  p.v[samples - 1] = u;
  for (std::size_t i = samples - 1; i-- > 0;) {
    for (std::size_t k = at[i]; k < at[i + 1]; ++k) u += inc[k];
    p.v[i] = u;
  }
  p.meta = "alpha function, Delta u = 1";
  return p;
}

Verdict khasminskii_subsolution_test(const ModelManifold& M, const RadialProfile& u, const Nonlinearity& nl,
                                     double r_from) {
  if (!classify_stochastically_complete(M).holds())
    throw Error(ErrorCode::Precondition, "the model is not known to be stochastically complete");
  if (!(nl.lambda > 0.0) || !(nl.u_upper > nl.u_lower))
    throw Error(ErrorCode::Precondition, "need lambda > 0 and u_lower < u_upper");
  const Expr df = nl.f.derivative();
  for (int k = 0; k <= 200; ++k) {
    const double t = nl.u_lower + (nl.u_upper - nl.u_lower) * k / 200.0;
    if (!(nl.f.eval(t) > 0.0)) throw Error(ErrorCode::HypothesisFailure, "f(" + fmt(t) + ") is not positive");
    if (df.eval(t) > nl.lambda * (1 + 1e-12)) throw Error(ErrorCode::HypothesisFailure, "f'(" + fmt(t) + ") exceeds lambda");
  }
  const double span = nl.u_upper - nl.u_lower;
  std::vector<double> r, v;
  auto F = [&](double t) {
    return t <= nl.u_lower ? 0.0 : integrate_positive([&](double s) { return 1.0 / nl.f.eval(s); }, nl.u_lower, t, 1e-12);
  };
  const double F_top = F(nl.u_upper);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.r[i] < r_from) continue;
    const double x = u.v[i];
    if (x < nl.u_lower - 1e-12 * span || x > nl.u_upper + 1e-12 * span)
      throw Error(ErrorCode::RangeViolation, "u(" + fmt(u.r[i]) + ") = " + fmt(x) + " leaves [u_lower, u_upper]");
    r.push_back(u.r[i]);
    v.push_back(std::exp(nl.lambda * (F(std::clamp(x, nl.u_lower, nl.u_upper)) - F_top)));
  }
  if (r.size() < 3) throw Error(ErrorCode::Precondition, "profile has fewer than three nodes beyond r_from");
  // Conservative discrete Laplacian with the exact-integral cell coefficients,
  // which stays accurate where w changes by many orders across a cell.
  double worst = kInf;
  double worst_at = r.front();
  FvCell left = fv_cell(M, r[0], r[1]);
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    const FvCell right = fv_cell(M, r[i], r[i + 1]);
    const double lm = log_add(left.log_mass_right, right.log_mass_left);
    const double out_flux = std::exp(right.log_kappa - lm) * (v[i + 1] - v[i]);
    const double in_flux = std::exp(left.log_kappa - lm) * (v[i] - v[i - 1]);
    const double lap = out_flux - in_flux;
    const double scale = std::fabs(out_flux) + std::fabs(in_flux) + nl.lambda * v[i];
    const double margin = (lap - nl.lambda * v[i]) / scale;
    if (margin < worst) {
      worst = margin;
      worst_at = r[i];
    }
    left = right;
  }
  if (worst < -1e-3)
    throw Error(ErrorCode::NotSubsolution, "Delta v < lambda v at r = " + fmt(worst_at) + " (relative " + fmt(worst) + ")");
  Verdict out = Verdict::make(Truth::Fails, "bounded positive lambda-subsolution bounded away from zero");
  out.with("v_min", *std::min_element(v.begin(), v.end())).with("v_max", *std::max_element(v.begin(), v.end()));
  out.with("worst_relative_margin", worst).with("lambda", nl.lambda);
  return out;
}

}  // namespace feller
