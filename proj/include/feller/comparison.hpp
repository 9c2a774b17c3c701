#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "feller/exterior.hpp"
#include "feller/integrals.hpp"
#include "feller/verdict.hpp"
#include "feller/warping.hpp"

namespace feller {

using RadialFunction = std::function<double(double)>;

enum class BoundKind { SectionalUpper, RicciLower };

[[nodiscard]] const char* to_string(BoundKind k) noexcept;

/// Radial curvature bound G(r) in dimension m. Sectional: Sec_rad <= G.
/// Ricci: Ric(dr, dr) >= (m-1) G. Both compare against g'' + G g = 0.
struct CurvatureBound {
  Expr G;
  BoundKind kind = BoundKind::SectionalUpper;
  int dim = 2;
  std::string formula;

  static CurvatureBound parse(std::string_view formula, BoundKind kind, int m, const ParamTable& params = {});
};

struct JacobiOptions {
  double r_max = 1024.0;
  double rtol = 1e-12;
  double max_step = 0.02;
  double zero_tolerance = 1e-10;
  double start = 1e-4;  // series start g = r - G(0) r^3 / 6
  /// Optional closed-form solution used beyond `tail_from`. The forward
  /// solution must match it in value and slope there (relative `tail_match`);
  /// this keeps decaying Jacobi solutions usable past the point where the
  /// growing mode swamps forward integration.
  std::optional<WarpingSource> declared_tail;
  double tail_from = 0.0;
  double tail_match = 1e-4;
};

/// Solves g'' + G g = 0, g(0) = 0, g'(0) = 1 and returns the model with that
/// warping function, tabulated in log form. Throws ConjugatePointError at the
/// first zero of g.
[[nodiscard]] ModelManifold jacobi_model(const RadialFunction& G, int m, const JacobiOptions& opts = {});
[[nodiscard]] ModelManifold jacobi_model(const Expr& G, int m, const JacobiOptions& opts = {});

/// -g''/g of a warping function: the G whose Jacobi solution is g.
[[nodiscard]] RadialFunction radial_curvature(const WarpingFunction& g);

/// Sectional upper bound: Holds when the comparison model is Feller; never Fails.
[[nodiscard]] Verdict feller_by_sec_comparison(const Expr& G, int m, const JacobiOptions& opts = {});
[[nodiscard]] Verdict feller_by_sec_comparison(const RadialFunction& G, int m, const JacobiOptions& opts = {});
/// Ricci lower bound: Fails when the comparison model has finite volume and
/// is not Feller; never Holds.
[[nodiscard]] Verdict non_feller_by_ric_comparison(const RadialFunction& G, int m, const JacobiOptions& opts = {});
[[nodiscard]] Verdict non_feller_by_ric_comparison(const Expr& G, int m, const JacobiOptions& opts = {});
/// Dispatches on the bound kind.
[[nodiscard]] Verdict apply_bound(const CurvatureBound& bound, const JacobiOptions& opts = {});

/// Ric >= -(m-1) G^2 with G positive nondecreasing: Feller if 1/G is not
/// integrable. Holds then; Inconclusive when 1/G converges or G fails the
/// sampled monotonicity check.
[[nodiscard]] Verdict hsu_criterion(const Expr& G, const TailOptions& opts = {});

struct HsuSharpness {
  explicit HsuSharpness(ModelManifold M) : model(std::move(M)) {}

  ModelManifold model;
  double alpha = 0.0;              // estimate of limsup G'/G^2
  bool alpha_heuristic = true;     // sampled, not proved
  std::vector<double> window_maxima;
  Verdict curvature_check;         // -g''/g <= -beta (beta - alpha) G^2 on the tail
  ConvergenceVerdict volume_tail;  // g^{m-1} in L^1
  ConvergenceVerdict ratio_tail;   // int_r^inf g^{m-1} / g^{m-1} in L^1
  [[nodiscard]] bool checks_pass() const;
};

/// g = r near the pole, exp(-beta int_0^r G) beyond the window [r_a, r_b].
/// Throws HypothesisFailure naming the violated clause (positivity,
/// monotonicity, bounded G'/G^2, 1/G integrable, beta > alpha).
[[nodiscard]] HsuSharpness hsu_sharpness_model(const Expr& G, double beta, int m, double r_a = 1.0, double r_b = 2.0);

/// f > 0 with f' <= lambda on [u_lower, u_upper].
struct Nonlinearity {
  Expr f;
  double lambda = 1.0;
  double u_lower = 0.0;
  double u_upper = 1.0;
};

/// Given u with Delta u >= f(u) outside B_{r_from}, forms
/// v = exp(lambda (F(u) - F(u_upper))), F' = 1/f, checks Delta v >= lambda v
/// on the profile nodes and returns Fails when it holds. Requires a
/// stochastically complete model (Precondition otherwise). Throws
/// RangeViolation or NotSubsolution.
[[nodiscard]] Verdict khasminskii_subsolution_test(const ModelManifold& M, const RadialProfile& u,
                                                   const Nonlinearity& f, double r_from = 1.0);

/// u(r) = int_r^inf (int_s^inf w) / w(s) ds sampled on [r0, r1]; solves
/// Delta u = 1 wherever it is finite.
[[nodiscard]] RadialProfile alpha_function(const ModelManifold& M, double r0, double r1, std::size_t samples = 400);

}  // namespace feller
