#include "feller/exterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "feller/error.hpp"
#include "feller/fv.hpp"
#include "feller/ode.hpp"
#include "feller/quadrature.hpp"
#include "feller/tridiag.hpp"

namespace feller {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Nested grid on [R0, R0 2^n]: geometric nodes R0 2^{j/P}, each cell split
// uniformly while it lies in the fine window. Every R0 2^k is a node, so the
// grid for a smaller outer radius is a prefix of the grid for a larger one.
std::vector<double> build_grid(double R0, int doublings, const ExteriorOptions& opts) {
  std::vector<double> r;
  const int P = opts.nodes_per_octave;
  for (int n = 0; n < doublings; ++n) {
    const double A = std::ldexp(R0, n);
    for (int j = 0; j < P; ++j) {
      const double a = A * std::exp2(double(j) / P);
      const double b = (j + 1 == P) ? 2.0 * A : A * std::exp2(double(j + 1) / P);
      int sub = 1;
      if (a < R0 + opts.fine_length) sub = std::max(1, static_cast<int>(std::ceil((b - a) / opts.fine_spacing - 1e-9)));
      for (int s = 0; s < sub; ++s) r.push_back(a + (b - a) * s / sub);
    }
  }
  r.push_back(std::ldexp(R0, doublings));
  return r;
}

int doublings_for(double R0, double Rn) {
  const double k = std::log2(Rn / R0);
  const int n = static_cast<int>(std::lround(k));
  return (n >= 1 && std::fabs(k - n) < 1e-12) ? n : -1;
}

// Cell coefficients on a nested grid, computed once and reused across steps.
class Assembler {
 public:
  Assembler(const ModelManifold& M, const Potential& q) : M_(M), q_(q) {}

  void ensure(const std::vector<double>& r, std::size_t faces) {
    while (cells_.size() < faces) {
      const std::size_t i = cells_.size();
      cells_.push_back(fv_cell(M_, r[i], r[i + 1]));
    }
    while (log_q_.size() < faces + 1) {
      const double x = r[log_q_.size()];
      const double qv = q_(x);
      if (!(qv >= 0.0) || !std::isfinite(qv))
        throw Error(ErrorCode::NonPositivePotential, "q(" + std::to_string(x) + ") = " + std::to_string(qv));
      log_q_.push_back(qv > 0.0 ? std::log(qv) : kNegInf);
    }
  }

  const FvCell& cell(std::size_t i) const { return cells_[i]; }
  double log_q(std::size_t i) const { return log_q_[i]; }

 private:
  const ModelManifold& M_;
  const Potential& q_;
  std::vector<FvCell> cells_;
  std::vector<double> log_q_;
};

// Solve on nodes r[0..N] with h(r0) = inner and either h(rN) = outer or a
// zero-flux wall at rN.
std::vector<double> solve_on(const Assembler& as, std::size_t N, double inner, double outer, bool neumann) {
  const std::size_t n = neumann ? N : N - 1;  // unknowns r[1..n]
  Tridiagonal A(n);
  std::vector<double> rhs(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = k + 1;
    const double lk_left = as.cell(i - 1).log_kappa;
    const bool wall = neumann && i == N;
    const double lk_right = wall ? kNegInf : as.cell(i).log_kappa;
    const double lm = wall ? as.cell(i - 1).log_mass_right
                           : log_add(as.cell(i - 1).log_mass_right, as.cell(i).log_mass_left);
    const double lqm = as.log_q(i) == kNegInf ? kNegInf : as.log_q(i) + lm;
    const double s = std::max({lk_left, lk_right, lqm});
    const double sub = std::exp(lk_left - s), sup = std::exp(lk_right - s), react = std::exp(lqm - s);
    A.sub[k] = -sub;
    A.sup[k] = -sup;
    A.diag[k] = sub + sup + react;
    if (i == 1) rhs[k] += sub * inner;
    if (!neumann && i == N - 1) rhs[k] += sup * outer;
  }
  if (n > 0) A.sub[0] = 0.0;
  if (n > 0) A.sup[n - 1] = 0.0;
  std::vector<double> x = solve_tridiagonal(A, rhs);
  std::vector<double> h(N + 1);
  h[0] = inner;
  for (std::size_t k = 0; k < n; ++k) h[k + 1] = x[k];
  if (!neumann) h[N] = outer;
  return h;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

double RadialProfile::at(double x) const {
  if (r.empty()) throw Error(ErrorCode::Precondition, "empty profile");
  if (x <= r.front()) return v.front();
  if (x >= r.back()) return v.back();
  const auto it = std::upper_bound(r.begin(), r.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
  const double t = (x - r[i]) / (r[i + 1] - r[i]);
  return (1.0 - t) * v[i] + t * v[i + 1];
}

RadialProfile solve_annulus(const ModelManifold& M, double R0, double Rn, const Potential& q, double inner_value,
                            double outer_value, const ExteriorOptions& opts, bool neumann_outer) {
  if (!(R0 > 0.0 && Rn > R0)) throw Error(ErrorCode::Precondition, "solve_annulus needs 0 < R0 < Rn");
  std::vector<double> r;
  const int n = doublings_for(R0, Rn);
  if (n > 0) {
    r = build_grid(R0, n, opts);
  } else {
    // Arbitrary outer radius: geometric nodes with the same local spacing rule.
    const double ratio = std::exp2(1.0 / opts.nodes_per_octave);
    r.push_back(R0);
    while (r.back() < Rn) {
      double step = r.back() * (ratio - 1.0);
      if (r.back() < R0 + opts.fine_length) step = std::min(step, opts.fine_spacing);
      r.push_back(std::min(Rn, r.back() + step));
      if (Rn - r.back() < 1e-9 * Rn) r.back() = Rn;
    }
  }
  Assembler as(M, q);
  as.ensure(r, r.size() - 1);
  RadialProfile p;
  p.v = solve_on(as, r.size() - 1, inner_value, outer_value, neumann_outer);
  p.r = std::move(r);
  p.meta = "annulus [" + fmt(R0) + ", " + fmt(Rn) + "]" + (neumann_outer ? " neumann" : "");
  return p;
}

ExhaustionTrace minimal_exterior_solution(const ModelManifold& M, double R0, const Potential& q,
                                          const ExteriorOptions& opts) {
  if (!(R0 > 0.0)) throw Error(ErrorCode::Precondition, "R0 must be positive");
  ExhaustionTrace tr;
  tr.R0 = R0;
  tr.report_radius = opts.report_radius > 0.0 ? opts.report_radius : 256.0 * R0;
  tr.decay_threshold = opts.decay_threshold;
  tr.plateau_threshold = opts.plateau_threshold;
  Assembler as(M, q);
  std::vector<double> grid;
  for (int n = 1; n <= opts.max_doublings; ++n) {
    const double Rn = std::ldexp(R0, n);
    std::vector<double> h;
    try {
      grid = build_grid(R0, n, opts);
      as.ensure(grid, grid.size() - 1);
      h = solve_on(as, grid.size() - 1, 1.0, 0.0, false);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonPositivePotential) throw;
      tr.note = "stopped at outer radius " + fmt(Rn) + ": " + e.what();
      break;
    }
    RadialProfile p{grid, std::move(h), "exhaustion step R_n = " + fmt(Rn)};
    if (!tr.solutions.empty()) {
      const RadialProfile& prev = tr.solutions.back();
      double sup = 0.0, min_inc = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < prev.size(); ++i) {
        const double d = p.v[i] - prev.v[i];
        min_inc = std::min(min_inc, d);
        if (p.r[i] <= tr.report_radius * (1 + 1e-12)) sup = std::max(sup, std::fabs(d));
      }
      tr.sup_deltas.push_back(sup);
      tr.min_increments.push_back(min_inc);
    }
    tr.outer_radii.push_back(Rn);
    tr.solutions.push_back(std::move(p));
    if (tr.solutions.size() >= 2 && tr.sup_deltas.back() < opts.tolerance &&
        tr.outer_radii[tr.outer_radii.size() - 2] >= tr.report_radius * (1 - 1e-12)) {
      tr.converged = true;
      break;
    }
  }
  if (tr.solutions.empty()) return tr;
  const RadialProfile& last = tr.solutions.back();
  tr.log_kappa.resize(last.size() - 1);
  for (std::size_t i = 0; i + 1 < last.size(); ++i) tr.log_kappa[i] = as.cell(i).log_kappa;
  tr.far_value = last.at(tr.report_radius);
  tr.limit_estimate = tr.far_value < tr.decay_threshold ? 0.0 : tr.far_value;
  // Flux at R0 from the first face, corrected by the volume between R0 and that face.
  const double lw0 = M.log_w(R0);
  const double h0 = last.v[0], h1 = last.v[1];
  const double react = as.log_q(0) == kNegInf ? 0.0 : std::exp(as.log_q(0) + as.cell(0).log_mass_left - lw0) * h0;
  tr.inner_slope = std::exp(as.cell(0).log_kappa - lw0) * (h1 - h0) - react;
  if (!tr.converged && tr.note.empty()) tr.note = "no convergence within the doubling budget";
  return tr;
}

ExhaustionTrace minimal_exterior_solution(const ModelManifold& M, double R0, double lambda,
                                          const ExteriorOptions& opts) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::Precondition, "lambda must be positive");
  return minimal_exterior_solution(M, R0, [lambda](double) { return lambda; }, opts);
}

Verdict decay_verdict(const ExhaustionTrace& tr) {
  if (!tr.converged || tr.solutions.empty()) {
    Verdict v = Verdict::make(Truth::Inconclusive, "exhaustion did not converge: " + tr.note);
    return v.with("far_value", tr.far_value);
  }
  const RadialProfile& h = tr.limit();
  const double far = h.at(tr.report_radius);
  const double half = h.at(0.5 * tr.report_radius);
  const double decade = h.at(0.1 * tr.report_radius);
  Verdict v;
  if (far < tr.decay_threshold && (far == 0.0 || far <= 0.5 * half)) {
    v = Verdict::make(Truth::Holds, "minimal solution decays to zero in the far field");
  } else if (far > tr.plateau_threshold && std::fabs(half - far) < 0.01 * far) {
    v = Verdict::make(Truth::Fails, "minimal solution plateaus at a positive level");
  } else {
    v = Verdict::make(Truth::Inconclusive, "far field neither decayed nor flat");
  }
  v.with("far_value", far).with("half_radius_value", half).with("decade_value", decade);
  v.with("report_radius", tr.report_radius).with("outer_radius", tr.outer_radii.back());
  v.with("final_sup_delta", tr.sup_deltas.empty() ? 0.0 : tr.sup_deltas.back());
  return v;
}

CauchyProfile cauchy_solution(const ModelManifold& M, double R0, double lambda, double alpha, double r_end,
                              double inner_value) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::Precondition, "lambda must be positive");
  if (!(r_end > R0 && R0 > 0.0)) throw Error(ErrorCode::Precondition, "cauchy_solution needs 0 < R0 < r_end");
  const double l0 = M.log_w(R0);
  CauchyProfile out;
  auto rhs = [&](double r, const State2& y) -> State2 {
    const double dl = M.log_w(r) - l0;
    return {y[1] * std::exp(-dl), lambda * std::exp(dl) * y[0]};
  };
  OdeOptions o;
  o.rtol = 1e-12;
  o.atol = 1e-300;
  o.max_step = 0.02;
  std::vector<OdeSample> path;
  try {
    path = integrate_dopri5(rhs, R0, {inner_value, alpha}, r_end, o, [&](const OdeSample& s) {
      return !(std::fabs(s.y[0]) < 1e250 && std::fabs(s.y[1]) < 1e250);
    });
  } catch (const Error& e) {
    out.truncated = true;
    out.profile.meta = e.what();
  }
  for (const auto& s : path) {
    if (!(std::isfinite(s.y[0]) && std::isfinite(s.y[1]))) break;
    out.profile.r.push_back(s.t);
    out.profile.v.push_back(s.y[0]);
    out.flux.push_back(s.y[1]);
  }
  if (!out.profile.r.empty() && out.profile.r.back() < r_end) {
    out.truncated = true;
    out.truncation_radius = out.profile.r.back();
  }
  if (out.profile.meta.empty()) out.profile.meta = "cauchy alpha = " + fmt(alpha);
  return out;
}

CauchyProfile regular_solution(const ModelManifold& M, double lambda, double r_end) {
  const int m = M.dim();
  const double eps = M.pole_eps();
  auto rhs = [&](double r, const State2& y) -> State2 { return {y[1], lambda * y[0] - M.dlog_w(r) * y[1]}; };
  OdeOptions o;
  o.rtol = 1e-12;
  o.atol = 1e-300;
  o.max_step = 0.02;
  CauchyProfile out;
  const State2 y0{1.0 + lambda * eps * eps / (2.0 * m), lambda * eps / m};
  const auto path = integrate_dopri5(rhs, eps, y0, r_end, o, [](const OdeSample& s) {
    return !(std::fabs(s.y[0]) < 1e250 && std::fabs(s.y[1]) < 1e250);
  });
  out.profile.r.push_back(0.0);
  out.profile.v.push_back(1.0);
  out.flux.push_back(0.0);
  for (const auto& s : path) {
    out.profile.r.push_back(s.t);
    out.profile.v.push_back(s.y[0]);
    out.flux.push_back(s.y[1]);  // u' itself for the regular solution
  }
  if (out.profile.r.back() < r_end) {
    out.truncated = true;
    out.truncation_radius = out.profile.r.back();
  }
  out.profile.meta = "regular solution, u(0) = 1";
  return out;
}

std::vector<double> discrete_flux(const ExhaustionTrace& tr) {
  const RadialProfile& h = tr.limit();
  std::vector<double> f(h.size() - 1);
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    const double d = h.v[i + 1] - h.v[i];
    f[i] = d == 0.0 ? 0.0 : std::copysign(std::exp(tr.log_kappa[i] + std::log(std::fabs(d))), d);
  }
  return f;
}

ExhaustionChecks check_exhaustion(const ExhaustionTrace& tr, double slack) {
  ExhaustionChecks c;
  for (double d : tr.min_increments) c.worst_monotone_violation = std::max(c.worst_monotone_violation, -d);
  c.monotone_in_n = c.worst_monotone_violation <= slack;

  constexpr double kUnderflow = 1e-250;
  for (const auto& p : tr.solutions) {
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      const double v = p.v[i];
      const bool underflowed = v == 0.0 && i > 0 && p.v[i - 1] < kUnderflow;
      if (!((v > 0.0 || underflowed) && v <= 1.0 + slack)) c.bounded = false;
    }
  }

  const RadialProfile& h = tr.limit();
  // Fluxes kappa (h_{i+1} - h_i), compared pairwise on a shared log scale.
  bool seen_nonneg = false;
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    const double d = h.v[i + 1] - h.v[i];
    const bool both_tiny = std::fabs(h.v[i]) < kUnderflow && std::fabs(h.v[i + 1]) < kUnderflow;
    if (!both_tiny) {
      if (!(d < 0.0)) c.strictly_decreasing = false;
      if (d >= 0.0 && i > 0) seen_nonneg = true;
      else if (seen_nonneg) c.slope_dichotomy = false;
    }
    if (i == 0) continue;
    const double d_prev = h.v[i] - h.v[i - 1];
    const double s = std::max(tr.log_kappa[i], tr.log_kappa[i - 1]);
    const double f_right = std::exp(tr.log_kappa[i] - s) * d;
    const double f_left = std::exp(tr.log_kappa[i - 1] - s) * d_prev;
    const double scale = std::max(std::fabs(f_right), std::fabs(f_left));
    if (f_right - f_left < -1e-9 * scale - 1e-300) c.flux_nondecreasing = false;
  }
  return c;
}

bool dominated_by(const ExhaustionTrace& tr, const RadialProfile& u, double slack) {
  const RadialProfile& h = tr.limit();
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h.r[i] < u.r.front() || h.r[i] > u.r.back()) continue;
    if (h.v[i] > u.at(h.r[i]) + slack) return false;
  }
  return true;
}

}  // namespace feller
