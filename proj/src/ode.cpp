#include "feller/ode.hpp"

#include <algorithm>
#include <cmath>

#include "feller/error.hpp"

namespace feller {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

State2 axpy(const State2& y, double h, std::initializer_list<std::pair<double, const State2*>> terms) {
  State2 out = y;
  for (const auto& [c, k] : terms)
    for (int i = 0; i < 2; ++i) out[i] += h * c * (*k)[i];
  return out;
}

}  // namespace

std::vector<OdeSample> integrate_dopri5(const Rhs2& f, double t0, State2 y0, double t1, const OdeOptions& opts,
                                        const std::function<bool(const OdeSample&)>& stop) {
  std::vector<OdeSample> out{{t0, y0}};
  double t = t0, h = std::min(opts.initial_step, t1 - t0);
  State2 y = y0;
  State2 k1 = f(t, y);
  long steps = 0;
  while (t < t1) {
    if (++steps > opts.max_steps) throw Error(ErrorCode::EvaluationFailure, "ODE step budget exhausted");
    h = std::min({h, opts.max_step, t1 - t});
    const State2 k2 = f(t + c2 * h, axpy(y, h, {{a21, &k1}}));
    const State2 k3 = f(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const State2 k4 = f(t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State2 k5 = f(t + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State2 k6 = f(t + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State2 y5 = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State2 k7 = f(t + h, y5);
    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opts.atol + opts.rtol * std::max(std::fabs(y[i]), std::fabs(y5[i]));
      err = std::max(err, std::fabs(e) / sc);
    }
    if (!std::isfinite(err)) {
      h *= 0.25;
      if (h < 1e-300) throw Error(ErrorCode::EvaluationFailure, "ODE right-hand side not finite");
      continue;
    }
    if (err <= 1.0) {
      t = (t1 - t - h <= 1e-15 * std::fabs(t1)) ? t1 : t + h;
      y = y5;
      k1 = k7;
      out.push_back({t, y});
      if (stop && stop(out.back())) break;
    }
    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= fac;
  }
  return out;
}

}  // namespace feller
