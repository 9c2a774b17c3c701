#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "feller/expr.hpp"
#include "feller/integrals.hpp"
#include "feller/verdict.hpp"

namespace feller {

/// Faber-Krahn profile: lambda_1(Omega) >= Lambda(vol Omega) with Lambda
/// positive and decreasing on (0, s_max]. V(t) inverts
/// t = int_0^V ds / (s Lambda(s)).
class FaberKrahnProfile {
 public:
  explicit FaberKrahnProfile(Expr Lambda, std::string description = {},
                             double s_max = std::numeric_limits<double>::infinity());
  /// Lambda as a formula in the variable s.
  static FaberKrahnProfile parse(std::string_view formula, const ParamTable& params = {});

  [[nodiscard]] double Lambda(double s) const;
  [[nodiscard]] const Expr& expr() const noexcept { return Lambda_; }
  [[nodiscard]] const std::string& description() const noexcept { return description_; }
  [[nodiscard]] double s_max() const noexcept { return s_max_; }

  /// Tail test of 1/(s Lambda(s)) at 0+, cached.
  [[nodiscard]] const ConvergenceVerdict& integrability() const;
  [[nodiscard]] bool admissible() const { return integrability().convergent(); }

  /// t(V) = int_0^V ds / (s Lambda(s)). Throws Inadmissible.
  [[nodiscard]] double t_of_v(double V) const;

 private:
  struct Cache;
  Expr Lambda_;
  std::string description_;
  double s_max_;
  std::shared_ptr<Cache> cache_;
};

/// Solves t(V) = t by bracketing and bisection polished with Newton steps.
/// Throws Inadmissible, or DomainExceeded past s_max.
[[nodiscard]] double v_from_lambda(const FaberKrahnProfile& P, double t);

/// t V'(t) / V(t) = t Lambda(V(t)).
[[nodiscard]] double log_growth_rate(const FaberKrahnProfile& P, double t);

struct RegularityResult {
  bool pass = false;
  std::string reason;
  std::vector<std::pair<double, double>> samples;  // (t, t V'/V)
};

/// tV'/V bounded on (0, 2T] and nondecreasing for t > T, sampled on a
/// logarithmic grid of [1e-6, 1e6]. T = +inf checks boundedness only.
[[nodiscard]] RegularityResult check_regularity(const FaberKrahnProfile& P,
                                                double T = std::numeric_limits<double>::infinity(),
                                                double bound = 1e8);

struct GaussianConstants {
  double C = 1.0;
  double c = 1.0;
  double D = 5.0;
};

/// C / V(c t) exp(-d^2 / (D t)); needs D > 4 and t > 0.
[[nodiscard]] double gaussian_bound(const FaberKrahnProfile& P, const GaussianConstants& k, double d, double t);

/// Lambda(s) = (g(s)/s)^2 / 4 from an isoperimetric function g; g(s)/s must
/// be nonincreasing (MonotonicityFailure otherwise).
[[nodiscard]] FaberKrahnProfile cheeger_reduce(const Expr& g, std::string description = {});

/// Holds when the profile is admissible and regular; otherwise Inconclusive.
[[nodiscard]] Verdict feller_from_faber_krahn(const FaberKrahnProfile& P,
                                              double T = std::numeric_limits<double>::infinity());

}  // namespace feller
