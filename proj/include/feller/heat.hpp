#pragma once

#include <utility>
#include <vector>

#include "feller/exterior.hpp"
#include "feller/verdict.hpp"
#include "feller/warping.hpp"

namespace feller {

struct HeatOptions {
  double fine_spacing = 0.01;    // uniform spacing on [0, fine_radius]
  double fine_radius = 8.0;
  int nodes_per_octave = 32;     // geometric beyond fine_radius
  double report_radius = 8.0;    // window on which wall independence is required
  double dt_max = 1e-3;
  int min_steps = 200;           // dt = min(dt_max, t / min_steps)
  double wall_tolerance = 1e-8;
  int max_wall_doublings = 8;
  double richardson_tolerance = 1e-5;
  double decay_threshold = 1e-6;
  double plateau_threshold = 1e-3;
};

/// Radial initial data: the indicator of [0, R] scaled by `value`, a
/// constant, or an arbitrary sampled profile.
struct InitialData {
  enum class Kind { Indicator, Constant, Profile };
  Kind kind = Kind::Constant;
  double radius = 0.0;
  double value = 1.0;
  RadialProfile profile;

  static InitialData indicator(double R, double value = 1.0);
  static InitialData constant(double value = 1.0);
  static InitialData from_profile(RadialProfile p);
};

struct HeatState {
  RadialProfile profile;          // grid and u(t, r_i); the last node is the wall
  double time = 0.0;
  double outer_radius = 0.0;
  double mass = 0.0;              // c_m int u g^{m-1} dr
  double log_mass = 0.0;
  double initial_mass = 0.0;
  double richardson_error = 0.0;  // sup change of the extrapolated solution against the finer level
  bool richardson_ok = true;
  double wall_delta = 0.0;        // sup change on the report window under the last wall doubling
  bool wall_too_close = false;
  std::string note;
};

/// Implicit Euler for u_t = (w u')'/w with a zero-flux pole and u = 0 at
/// the wall, Richardson-extrapolated from steps dt, dt/2 and dt/4. The wall
/// doubles until the report window stops moving.
[[nodiscard]] HeatState evolve(const ModelManifold& M, const InitialData& initial, double t,
                               const HeatOptions& opts = {});

/// Evolves the indicator of [0, R] to time t and inspects the profile at
/// the sample radii. Holds when the largest sample is below the decay
/// threshold and at most half the previous one; Fails when it is above the
/// plateau threshold and within 1% of the previous one. The evolved state
/// is copied to `state` when given.
[[nodiscard]] Verdict feller_probe(const ModelManifold& M, double R, double t, const std::vector<double>& r_samples,
                                   HeatOptions opts = {}, HeatState* state = nullptr);

/// Default sample radii R * {8, 16, 32, 64}.
[[nodiscard]] std::vector<double> default_probe_radii(double R);

/// Probe times used when a scenario does not name any.
[[nodiscard]] std::vector<double> default_probe_times();

/// (P_t 1)(o) at each requested time: the total mass of the heat kernel
/// issued from the pole. t = 0 gives 1.
[[nodiscard]] std::vector<std::pair<double, double>> mass_history(const ModelManifold& M,
                                                                  const std::vector<double>& t_grid,
                                                                  const HeatOptions& opts = {});

}  // namespace feller
