#include "feller/heat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "feller/error.hpp"
#include "feller/fv.hpp"
#include "feller/quadrature.hpp"
#include "feller/tridiag.hpp"

namespace feller {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Grid {
  std::vector<double> r;         // r[0] = 0, r.back() = wall
  std::vector<double> log_kappa; // per face
  std::vector<double> log_mass;  // per node, wall excluded
  std::vector<double> mass_left_of;  // log volume of cell i-1 credited to node i
};

// Uniform on [0, fine_radius], geometric beyond; an extra node is inserted at
// `pin` (the edge of indicator data) so that cell averages are exact.
Grid build_grid(const ModelManifold& M, double wall, const HeatOptions& o, double pin) {
  Grid g;
  const int nf = static_cast<int>(std::lround(o.fine_radius / o.fine_spacing));
  for (int i = 0; i <= nf; ++i) g.r.push_back(o.fine_radius * i / nf);
  const double ratio = std::exp2(1.0 / o.nodes_per_octave);
  for (int j = 1;; ++j) {
    const double x = o.fine_radius * std::pow(ratio, j);
    if (x >= wall * (1 - 1e-12)) break;
    g.r.push_back(x);
  }
  g.r.push_back(wall);
  if (pin > 0.0 && pin < wall) {
    const auto it = std::lower_bound(g.r.begin(), g.r.end(), pin);
    const double gap = std::min(std::fabs(*it - pin), std::fabs(*(it - 1) - pin));
    if (gap > 1e-9 * pin) g.r.insert(it, pin);
  }
  const std::size_t N = g.r.size() - 1;
  std::vector<FvCell> cells(N);
  cells[0] = fv_pole_cell(M, g.r[1]);
  for (std::size_t i = 1; i < N; ++i) cells[i] = fv_cell(M, g.r[i], g.r[i + 1]);
  g.log_kappa.resize(N);
  g.log_mass.resize(N);
  g.mass_left_of.assign(N + 1, kNegInf);
  for (std::size_t i = 0; i < N; ++i) {
    g.log_kappa[i] = cells[i].log_kappa;
    g.mass_left_of[i + 1] = cells[i].log_mass_right;
    g.log_mass[i] = log_add(g.mass_left_of[i], cells[i].log_mass_left);
  }
  return g;
}

std::vector<double> project(const Grid& g, const InitialData& init) {
  const std::size_t N = g.r.size() - 1;
  std::vector<double> u(N + 1, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    switch (init.kind) {
      case InitialData::Kind::Constant:
        u[i] = init.value;
        break;
      case InitialData::Kind::Profile:
        u[i] = g.r[i] <= init.profile.r.back() ? init.profile.at(g.r[i]) : 0.0;
        break;
      case InitialData::Kind::Indicator: {
        const double R = init.radius, x = g.r[i];
        if (x < R * (1 - 1e-12)) u[i] = init.value;
        else if (x <= R * (1 + 1e-12)) u[i] = init.value * std::exp(g.mass_left_of[i] - g.log_mass[i]);
        break;
      }
    }
  }
  return u;
}

std::vector<double> march(const Grid& g, std::vector<double> u, double t, int steps) {
  const std::size_t N = g.r.size() - 1;  // unknowns 0..N-1
  const double log_dt = std::log(t / steps);
  Tridiagonal A(N);
  std::vector<double> diag_weight(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double lm = g.log_mass[i] - log_dt;
    const double kl = i > 0 ? g.log_kappa[i - 1] : kNegInf;
    const double kr = g.log_kappa[i];
    const double s = std::max({lm, kl, kr});
    const double a = std::exp(lm - s), l = std::exp(kl - s), r = std::exp(kr - s);
    A.sub[i] = -l;
    A.sup[i] = i + 1 < N ? -r : 0.0;
    A.diag[i] = a + l + r;
    diag_weight[i] = a;
  }
  const TridiagonalFactor F(A);
  std::vector<double> x(N);
  for (int n = 0; n < steps; ++n) {
    for (std::size_t i = 0; i < N; ++i) x[i] = diag_weight[i] * u[i];
    F.solve_in_place(x);
    std::copy(x.begin(), x.end(), u.begin());
  }
  u[N] = 0.0;
  return u;
}

double log_total_mass(const Grid& g, const std::vector<double>& u) {
  double lm = kNegInf;
  for (std::size_t i = 0; i + 1 < g.r.size(); ++i)
    if (u[i] > 0.0) lm = log_add(lm, g.log_mass[i] + std::log(u[i]));
  return lm;
}

double initial_sup(const InitialData& init) {
  if (init.kind != InitialData::Kind::Profile) return init.value;
  double s = 0.0;
  for (double v : init.profile.v) s = std::max(s, v);
  return s;
}

struct Solved {
  Grid grid;
  std::vector<double> u;
  double richardson_error;
};

Solved solve_with_wall(const ModelManifold& M, const InitialData& init, double t, double wall, const HeatOptions& o) {
  Solved s{build_grid(M, wall, o, init.kind == InitialData::Kind::Indicator ? init.radius : 0.0), {}, 0.0};
  const std::vector<double> u0 = project(s.grid, init);
  const int n = std::max(1, static_cast<int>(std::ceil(std::max(t / o.dt_max, double(o.min_steps)) - 1e-9)));
  const auto u1 = march(s.grid, u0, t, n);
  const auto u2 = march(s.grid, u0, t, 2 * n);
  const auto u4 = march(s.grid, u0, t, 4 * n);
  const double top = initial_sup(init);
  s.u.resize(u0.size());
  for (std::size_t i = 0; i < u0.size(); ++i) {
    const double e2 = 2 * u2[i] - u1[i];
    const double e2f = 2 * u4[i] - u2[i];
    const double e3 = (4 * e2f - e2) / 3;
    s.richardson_error = std::max(s.richardson_error, std::fabs(e3 - e2f));
    // The continuous solution obeys the maximum principle; extrapolation may not.
    s.u[i] = std::clamp(e3, 0.0, top);
  }
  return s;
}

}  // namespace

InitialData InitialData::indicator(double R, double value) {
  if (!(R > 0.0)) throw Error(ErrorCode::Precondition, "indicator radius must be positive");
  InitialData d;
  d.kind = Kind::Indicator;
  d.radius = R;
  d.value = value;
  return d;
}

InitialData InitialData::constant(double value) {
  InitialData d;
  d.value = value;
  return d;
}

InitialData InitialData::from_profile(RadialProfile p) {
  if (p.r.empty()) throw Error(ErrorCode::Precondition, "empty initial profile");
  InitialData d;
  d.kind = Kind::Profile;
  d.profile = std::move(p);
  return d;
}

HeatState evolve(const ModelManifold& M, const InitialData& initial, double t, const HeatOptions& opts) {
  if (!(t > 0.0)) throw Error(ErrorCode::Precondition, "evolve needs t > 0");
  const double top = initial_sup(initial);
  if (!(top >= 0.0) || !std::isfinite(top)) throw Error(ErrorCode::Precondition, "initial data must be bounded");
  if (initial.kind == InitialData::Kind::Profile)
    for (double v : initial.profile.v)
      if (v < 0.0) throw Error(ErrorCode::Precondition, "initial data must be nonnegative");

  double wall = 16.0;
  while (wall < 2.0 * std::max(opts.report_radius, opts.fine_radius)) wall *= 2.0;
  if (initial.kind == InitialData::Kind::Indicator)
    while (wall < 2.0 * initial.radius) wall *= 2.0;

  HeatState st;
  Solved prev = solve_with_wall(M, initial, t, wall, opts);
  double delta = std::numeric_limits<double>::infinity();
  int k = 0;
  for (; k < opts.max_wall_doublings; ++k) {
    Solved next;
    try {
      next = solve_with_wall(M, initial, t, 2.0 * wall, opts);
    } catch (const Error& e) {
      st.note = std::string("wall doubling stopped: ") + e.what();
      break;
    }
    delta = 0.0;
    // The grids are nested, so common nodes share indices up to the old wall.
    for (std::size_t i = 0; i < prev.grid.r.size() && prev.grid.r[i] <= opts.report_radius; ++i)
      delta = std::max(delta, std::fabs(next.u[i] - prev.u[i]));
    wall *= 2.0;
    prev = std::move(next);
    if (delta < opts.wall_tolerance) break;
  }
  st.wall_delta = delta;
  st.wall_too_close = !(delta < opts.wall_tolerance);
  st.profile.r = prev.grid.r;
  st.profile.v = prev.u;
  st.profile.meta = "heat t = " + std::to_string(t);
  st.time = t;
  st.outer_radius = wall;
  st.richardson_error = prev.richardson_error;
  st.richardson_ok = prev.richardson_error <= opts.richardson_tolerance * std::max(top, 1e-300);
  const double lc = M.log_sphere_constant();
  st.log_mass = lc + log_total_mass(prev.grid, prev.u);
  st.mass = std::exp(st.log_mass);
  st.initial_mass = std::exp(lc + log_total_mass(prev.grid, project(prev.grid, initial)));
  return st;
}

std::vector<double> default_probe_radii(double R) { return {8 * R, 16 * R, 32 * R, 64 * R}; }

std::vector<double> default_probe_times() { return {0.1, 1.0, 10.0}; }

Verdict feller_probe(const ModelManifold& M, double R, double t, const std::vector<double>& r_samples,
                     HeatOptions opts, HeatState* state) {
  if (!(R > 0.0 && t > 0.0)) throw Error(ErrorCode::Precondition, "feller_probe needs R > 0 and t > 0");
  if (r_samples.size() < 2) throw Error(ErrorCode::Precondition, "feller_probe needs at least two sample radii");
  opts.report_radius = std::max(opts.report_radius, r_samples.back());
  const HeatState st = evolve(M, InitialData::indicator(R), t, opts);
  const double last = st.profile.at(r_samples.back());
  const double prev = st.profile.at(r_samples[r_samples.size() - 2]);
  Verdict v;
  if (st.wall_too_close) {
    v = Verdict::make(Truth::Inconclusive, "wall not far enough for the sample radii");
  } else if (last < opts.decay_threshold && (last == 0.0 || last <= 0.5 * prev)) {
    v = Verdict::make(Truth::Holds, "P_t 1_{B_R} decays at the sampled radii");
  } else if (last > opts.plateau_threshold && std::fabs(last - prev) < 0.01 * last) {
    v = Verdict::make(Truth::Fails, "P_t 1_{B_R} plateaus at the sampled radii");
  } else {
    v = Verdict::make(Truth::Inconclusive, "profile neither decayed nor flat at the sampled radii");
  }
  v.with("t", t).with("R", R);
  for (double r : r_samples) v.with("u(" + std::to_string(r) + ")", st.profile.at(r));
  v.with("outer_radius", st.outer_radius).with("richardson_error", st.richardson_error);
  if (state) *state = st;
  return v;
}

std::vector<std::pair<double, double>> mass_history(const ModelManifold& M, const std::vector<double>& t_grid,
                                                    const HeatOptions& opts) {
  std::vector<std::pair<double, double>> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    if (t == 0.0) {
      out.emplace_back(0.0, 1.0);
      continue;
    }
    const HeatState st = evolve(M, InitialData::constant(1.0), t, opts);
    out.emplace_back(t, st.profile.v.front());
  }
  return out;
}

}  // namespace feller
