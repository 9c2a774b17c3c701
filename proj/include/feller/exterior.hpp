#pragma once

#include <functional>
#include <string>
#include <vector>

#include "feller/verdict.hpp"
#include "feller/warping.hpp"

namespace feller {

/// A radial function sampled on a strictly increasing grid.
struct RadialProfile {
  std::vector<double> r;
  std::vector<double> v;
  std::string meta;

  [[nodiscard]] std::size_t size() const noexcept { return r.size(); }
  /// Linear interpolation; clamps outside the grid.
  [[nodiscard]] double at(double x) const;
};

/// Radial potential q(r) >= 0.
using Potential = std::function<double(double)>;

struct ExteriorOptions {
  int nodes_per_octave = 70;      // geometric ratio 2^{1/70}, about 1.01
  double fine_spacing = 0.01;     // maximal spacing on [R0, R0 + fine_length]
  double fine_length = 16.0;
  double report_radius = 0.0;     // 0 selects 256 R0
  double tolerance = 1e-8;        // sup-norm change between exhaustion steps
  int max_doublings = 24;
  double decay_threshold = 1e-6;
  double plateau_threshold = 1e-3;
};

/// Conservative finite-volume solve of (w h')' = q w h on [R0, Rn] with
/// Dirichlet data; w = g^{m-1}. With `neumann_outer` the outer condition is
/// h'(Rn) = 0 instead of h(Rn) = outer_value.
[[nodiscard]] RadialProfile solve_annulus(const ModelManifold& M, double R0, double Rn, const Potential& q,
                                          double inner_value, double outer_value, const ExteriorOptions& opts = {},
                                          bool neumann_outer = false);

struct ExhaustionTrace {
  double R0 = 1.0;
  double report_radius = 0.0;
  std::vector<double> outer_radii;
  std::vector<RadialProfile> solutions;
  std::vector<double> sup_deltas;
  std::vector<double> min_increments;  // min over common nodes of h_{n+1} - h_n
  double far_value = 0.0;              // h(report_radius) of the last solution
  double limit_estimate = 0.0;         // far_value, or 0 once below the decay threshold
  double inner_slope = 0.0;            // h'(R0) of the last solution
  std::vector<double> log_kappa;       // face conductances of the last grid
  bool converged = false;
  std::string note;
  double decay_threshold = 1e-6;
  double plateau_threshold = 1e-3;

  [[nodiscard]] const RadialProfile& limit() const { return solutions.back(); }
};

/// Exhaustion by annuli [R0, R0 2^n] with boundary values (1, 0).
[[nodiscard]] ExhaustionTrace minimal_exterior_solution(const ModelManifold& M, double R0, const Potential& q,
                                                        const ExteriorOptions& opts = {});
[[nodiscard]] ExhaustionTrace minimal_exterior_solution(const ModelManifold& M, double R0, double lambda,
                                                        const ExteriorOptions& opts = {});

/// Holds: the far field is below the decay threshold and still shrinking.
/// Fails: the far field sits above the plateau threshold and moved less than
/// 1% between half the reporting radius and the reporting radius. Inconclusive otherwise.
[[nodiscard]] Verdict decay_verdict(const ExhaustionTrace& trace);

struct CauchyProfile {
  RadialProfile profile;
  std::vector<double> flux;  // w h' relative to w(R0)
  bool truncated = false;    // the solution left double range
  double truncation_radius = 0.0;
};

/// Initial value problem h(R0) = inner_value, h'(R0) = alpha for
/// h'' + (log w)' h' = lambda h, integrated in the variables (h, w h' / w(R0)).
[[nodiscard]] CauchyProfile cauchy_solution(const ModelManifold& M, double R0, double lambda, double alpha,
                                            double r_end, double inner_value = 1.0);

/// The solution of Delta u = lambda u regular at the pole, u(0) = 1.
[[nodiscard]] CauchyProfile regular_solution(const ModelManifold& M, double lambda, double r_end);

/// Discrete structure checks on an exhaustion trace.
struct ExhaustionChecks {
  double worst_monotone_violation = 0.0;  // max over n of (h_n - h_{n+1})_+
  bool monotone_in_n = true;
  bool bounded = true;                    // 0 < h <= 1 (Dirichlet zero at the wall excluded)
  bool flux_nondecreasing = true;
  bool strictly_decreasing = true;
  bool slope_dichotomy = true;            // once a forward difference is >= 0 it stays so
};

[[nodiscard]] ExhaustionChecks check_exhaustion(const ExhaustionTrace& trace, double slack = 1e-10);

/// True when h <= u pointwise on the shared range (u a supersolution).
[[nodiscard]] bool dominated_by(const ExhaustionTrace& trace, const RadialProfile& u, double slack = 1e-10);

/// Discrete flux kappa_i (h_{i+1} - h_i) on each face of the last solution.
[[nodiscard]] std::vector<double> discrete_flux(const ExhaustionTrace& trace);

}  // namespace feller
