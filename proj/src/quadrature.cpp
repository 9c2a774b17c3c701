#include "feller/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "feller/error.hpp"

namespace feller {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// QUADPACK qk21 abscissae and weights.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525868593, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Piece {
  double a, b;
  double log_value;
  double log_error;
};

Piece gk21(const LogIntegrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double hl = 0.5 * (b - a);
  // Nodes are visited left to right; cumulative integrands exploit that.
  std::array<double, 21> phi{};
  for (int j = 0; j < 10; ++j) phi[1 + 2 * j] = f(c - hl * kXgk[j]);
  phi[0] = f(c);
  for (int j = 9; j >= 0; --j) phi[2 + 2 * j] = f(c + hl * kXgk[j]);
  double m = kNegInf, big = 0.0;
  for (double v : phi) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw Error(ErrorCode::EvaluationFailure, "integrand is not finite on [" + std::to_string(a) + ", " +
                                                    std::to_string(b) + "]");
    m = std::max(m, v);
    if (std::isfinite(v)) big = std::max(big, std::fabs(v));
  }
  if (m == kNegInf) return {a, b, kNegInf, kNegInf};
  double k = kWgk[10] * std::exp(phi[0] - m);
  double g = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double s = std::exp(phi[1 + 2 * j] - m) + std::exp(phi[2 + 2 * j] - m);
    k += kWgk[j] * s;
    if (j % 2 == 1) g += kWg[j / 2] * s;
  }
  // Rounding in a log-integrand of size |phi| perturbs exp(phi) by about
  // |phi| * eps relative; differences below that level are not resolvable.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * big * k;
  const double err = std::max(0.0, std::fabs(k - g) - noise);
  const double lh = std::log(hl);
  return {a, b, m + lh + std::log(k), err > 0.0 ? m + lh + std::log(err) : kNegInf};
}

struct ByError {
  bool operator()(const Piece& x, const Piece& y) const { return x.log_error < y.log_error; }
};

}  // namespace

double log_add(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

LogQuadResult log_integrate(const LogIntegrand& f_log, double a, double b, double rtol, int max_intervals,
                            double log_scale) {
  if (!(b > a)) return {kNegInf, kNegInf, 0, true};
  std::priority_queue<Piece, std::vector<Piece>, ByError> queue;
  std::vector<Piece> done;  // pieces with zero error estimate
  queue.push(gk21(f_log, a, b));
  int intervals = 1;
  const double log_rtol = std::log(rtol);
  auto target = [&](double log_v) { return log_rtol + std::max(log_v, log_scale); };

  auto totals = [&]() {
    // Deterministic order: sort by left endpoint before summing.
    std::vector<Piece> all = done;
    auto copy = queue;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
    double v = kNegInf, e = kNegInf;
    for (const auto& p : all) {
      v = log_add(v, p.log_value);
      e = log_add(e, p.log_error);
    }
    return std::pair{v, e};
  };

  // Running totals with a fixed reference scale; exact totals are recomputed
  // at the end so the result does not depend on update order.
  double ref = queue.top().log_value;
  if (ref == kNegInf) return {kNegInf, kNegInf, 1, true};
  double sum_v = 1.0, sum_e = std::exp(queue.top().log_error - ref);

  while (true) {
    if (!(sum_e > 0.0) || ref + std::log(sum_e) <= target(ref + std::log(std::max(sum_v, 1e-300)))) break;
    if (intervals >= max_intervals || queue.empty()) break;
    Piece p = queue.top();
    queue.pop();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) {
      done.push_back(p);
      continue;
    }
    const Piece l = gk21(f_log, p.a, mid);
    const Piece r = gk21(f_log, mid, p.b);
    ++intervals;
    sum_v -= std::exp(p.log_value - ref);
    sum_e -= std::exp(p.log_error - ref);
    for (const Piece& q : {l, r}) {
      if (q.log_value > ref + 30.0) {
        const double scale = std::exp(ref - q.log_value);
        sum_v *= scale;
        sum_e *= scale;
        ref = q.log_value;
      }
      sum_v += std::exp(q.log_value - ref);
      sum_e += std::exp(q.log_error - ref);
      if (q.log_error == kNegInf) done.push_back(q);
      else queue.push(q);
    }
    sum_v = std::max(sum_v, 0.0);
    sum_e = std::max(sum_e, 0.0);
  }
  const auto [v, e] = totals();
  return {v, e, intervals, e == kNegInf || e <= target(v)};
}

double integrate_positive(const std::function<double(double)>& f, double a, double b, double rtol) {
  const auto r = log_integrate(
      [&](double x) {
        const double v = f(x);
        return v > 0.0 ? std::log(v) : kNegInf;
      },
      a, b, rtol);
  return std::exp(r.log_value);
}

}  // namespace feller
