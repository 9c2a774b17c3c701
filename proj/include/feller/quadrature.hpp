#pragma once

#include <functional>
#include <limits>

namespace feller {

/// log(e^a + e^b) without overflow; -inf is the additive identity.
[[nodiscard]] double log_add(double a, double b) noexcept;

using LogIntegrand = std::function<double(double)>;

struct LogQuadResult {
  double log_value = 0.0;  // log of the integral
  double log_error = 0.0;  // log of the error estimate
  int intervals = 0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (10/21) quadrature of exp(f_log) over [a, b],
/// with all accumulation done in log space. Interval refinement follows the
/// largest local error. When the interval budget runs out the best estimate
/// is returned with converged = false. `log_scale` sets an absolute floor
/// for the error target: refinement stops once the error is below
/// rtol * max(integral, exp(log_scale)).
[[nodiscard]] LogQuadResult log_integrate(const LogIntegrand& f_log, double a, double b, double rtol = 1e-10,
                                          int max_intervals = 400,
                                          double log_scale = -std::numeric_limits<double>::infinity());

/// Plain-domain convenience wrapper over the same rule; f must be >= 0.
[[nodiscard]] double integrate_positive(const std::function<double(double)>& f, double a, double b,
                                        double rtol = 1e-10);

}  // namespace feller
