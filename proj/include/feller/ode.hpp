#pragma once

#include <array>
#include <functional>
#include <vector>

namespace feller {

using State2 = std::array<double, 2>;
using Rhs2 = std::function<State2(double, const State2&)>;

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-14;
  double max_step = 0.05;
  double initial_step = 1e-4;
  long max_steps = 2'000'000;
};

struct OdeSample {
  double t;
  State2 y;
};

/// Dormand-Prince 5(4) with standard step control. Calls `stop` after each
/// accepted step; returning true ends the integration early. Returns every
/// accepted step including the initial point.
std::vector<OdeSample> integrate_dopri5(const Rhs2& f, double t0, State2 y0, double t1, const OdeOptions& opts,
                                        const std::function<bool(const OdeSample&)>& stop = {});

}  // namespace feller
