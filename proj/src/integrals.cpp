#include "feller/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "feller/error.hpp"

namespace feller {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_horizon_error(ErrorCode c) {
  return c == ErrorCode::DomainExceeded || c == ErrorCode::EvaluationFailure || c == ErrorCode::NonPositiveValue;
}

}  // namespace

const char* to_string(Convergence c) noexcept {
  switch (c) {
    case Convergence::Convergent: return "Convergent";
    case Convergence::Divergent: return "Divergent";
    case Convergence::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

ConvergenceVerdict classify_tail(const LogIntegrand& f_log, double a, const TailOptions& opts) {
  if (!(a > 0.0)) throw Error(ErrorCode::Precondition, "classify_tail needs a > 0");
  ConvergenceVerdict out;
  const double log_keep = std::log(1.0 - opts.margin);
  const double log_div = std::log(1.0 - 1e-6);
  std::vector<double> lr;
  double total = kNegInf;
  bool loose = false;

  for (int k = 0; k < opts.window_budget; ++k) {
    const double lo = a * std::ldexp(1.0, k), hi = 2.0 * lo;
    LogQuadResult q;
    try {
      q = log_integrate(f_log, lo, hi, opts.rtol, opts.max_intervals);
    } catch (const Error& e) {
      if (!is_horizon_error(e.code())) throw;
      out.note = "horizon reached in window [" + std::to_string(lo) + ", " + std::to_string(hi) + "]: " + e.what();
      out.log_partial = total;
      out.partial_value = std::exp(total);
      return out;
    }
    if (!q.converged) loose = true;
    out.windows.push_back({lo, hi, q.log_value});
    if (k > 0) {
      const double prev = out.windows[k - 1].log_contribution;
      double r;
      if (q.log_value == kNegInf) r = kNegInf;
      else if (prev == kNegInf) r = kInf;
      else r = q.log_value - prev;
      lr.push_back(r);
      out.last_log_ratio = r;
    }
    total = log_add(total, q.log_value);

    const int n = static_cast<int>(lr.size());
    if (n < opts.confirm) continue;
    const auto first = lr.end() - opts.confirm;
    const bool all_small = std::all_of(first, lr.end(), [&](double x) { return x <= log_keep; });
    const bool all_big = std::all_of(first, lr.end(), [&](double x) { return x >= log_div; });
    if (all_small) {
      const double last = lr.back(), head = *first;
      const bool trend_ok = last == kNegInf || head == kNegInf || last + (last - head) <= log_keep;
      if (!trend_ok) continue;
      const bool stable = std::fabs(last - lr[n - 2]) < 0.01;
      const bool negligible = q.log_value == kNegInf || q.log_value - total < std::log(1e-14);
      if (!stable && !negligible) continue;
      double remainder = kNegInf;
      if (q.log_value != kNegInf && last != kNegInf) {
        const double rho = std::exp(last);
        remainder = q.log_value + std::log(rho / (1.0 - rho));
      }
      out.status = Convergence::Convergent;
      out.log_partial = log_add(total, remainder);
      out.partial_value = std::exp(out.log_partial);
      out.note = negligible ? "window contributions negligible" : "stable window ratio";
      if (loose) out.note += "; some windows hit the quadrature interval budget";
      return out;
    }
    if (all_big) {
      out.status = Convergence::Divergent;
      out.log_partial = total;
      out.partial_value = std::exp(total);
      out.note = "window contributions do not decay";
      if (loose) out.note += "; some windows hit the quadrature interval budget";
      return out;
    }
  }
  out.log_partial = total;
  out.partial_value = std::exp(total);
  out.note = "window budget exhausted";
  return out;
}

CumulativeIntegral::CumulativeIntegral(LogIntegrand f_log, int cells_per_octave, double rtol)
    : f_(std::move(f_log)), per_octave_(cells_per_octave), rtol_(rtol), r0_(std::ldexp(1.0, -10)) {
  prefix_.push_back(kNegInf);
}

double CumulativeIntegral::node(std::size_t k) const {
  if (k == 0) return 0.0;
  return r0_ * std::exp2(double(k - 1) / per_octave_);
}

std::size_t CumulativeIntegral::cell_of(double r) const {
  if (r < r0_) return 0;
  auto k = static_cast<std::size_t>(std::floor(per_octave_ * std::log2(r / r0_))) + 1;
  while (k > 0 && node(k) > r) --k;
  while (node(k + 1) <= r) ++k;
  return k;
}

double CumulativeIntegral::log_cell(std::size_t k) {
  extend_to(k + 1);
  return cells_[k];
}

void CumulativeIntegral::extend_to(std::size_t k) {
  while (cells_.size() < k) {
    const std::size_t j = cells_.size();
    const double c = log_integrate(f_, node(j), node(j + 1), rtol_, 200, prefix_.back()).log_value;
    cells_.push_back(c);
    prefix_.push_back(log_add(prefix_.back(), c));
  }
}

double CumulativeIntegral::log_between(double a, double b) {
  if (!(b > a)) return kNegInf;
  return log_integrate(f_, a, b, rtol_, 200).log_value;
}

double CumulativeIntegral::log_inner(double r) {
  if (r <= 0.0) return kNegInf;
  const std::size_t k = cell_of(r);
  extend_to(k);
  // Start from the closest earlier query when it lies in the same cell.
  double base_r = node(k), base = prefix_[k];
  auto it = inner_memo_.upper_bound(r);
  if (it != inner_memo_.begin()) {
    --it;
    if (it->first >= base_r) {
      base_r = it->first;
      base = it->second;
    }
  }
  const double v = log_add(base, r > base_r ? log_integrate(f_, base_r, r, rtol_, 200, base).log_value : kNegInf);
  inner_memo_.emplace(r, v);
  return v;
}

double CumulativeIntegral::log_total() {
  if (total_known_) return total_;
  // Octave blocks; stop once they are negligible or shrink at a stable rate,
  // then add the geometric remainder.
  const std::size_t P = static_cast<std::size_t>(per_octave_);
  const int max_octaves = 130;
  std::vector<double> blocks;
  double sum = kNegInf, remainder = kNegInf;
  bool settled = false;
  std::size_t k = 0;
  try {
    for (int j = 0; j < max_octaves && !settled; ++j) {
      double block = kNegInf;
      const std::size_t stop = (j == 0) ? 1 : k + P;  // cell 0 is [0, r0]
      for (; k < stop; ++k) block = log_add(block, log_cell(k));
      blocks.push_back(block);
      sum = log_add(sum, block);
      const std::size_t n = blocks.size();
      if (n < 4) continue;
      const bool tiny = [&] {
        for (std::size_t i = n - 2; i < n; ++i)
          if (!(blocks[i] == kNegInf || blocks[i] - sum < std::log(1e-17))) return false;
        return true;
      }();
      if (tiny) {
        settled = true;
        break;
      }
      const double r1 = blocks[n - 1] - blocks[n - 2], r2 = blocks[n - 2] - blocks[n - 3],
                   r3 = blocks[n - 3] - blocks[n - 4];
      if (r1 < std::log(0.95) && std::fabs(r1 - r2) < 0.01 && std::fabs(r2 - r3) < 0.01) {
        const double rho = std::exp(r1);
        remainder = blocks[n - 1] + std::log(rho / (1.0 - rho));
        settled = true;
      }
    }
  } catch (const Error& e) {
    if (!is_horizon_error(e.code())) throw;
    settled = !blocks.empty() && blocks.back() - sum < std::log(1e-17);
  }
  if (!settled) {
    total_known_ = true;
    total_ = kInf;
    return total_;
  }
  const std::size_t end = k;
  suffix_.assign(end + 1, kNegInf);
  suffix_[end] = remainder;
  for (std::size_t i = end; i-- > 0;) suffix_[i] = log_add(suffix_[i + 1], cells_[i]);
  total_ = log_add(prefix_[end], remainder);
  total_known_ = true;
  return total_;
}

double CumulativeIntegral::log_outer(double r) {
  const double total = log_total();
  if (total == kInf) return kInf;
  r = std::max(r, 0.0);
  const std::size_t k = cell_of(r);
  if (k + 1 < suffix_.size()) {
    double top_r = node(k + 1), top = suffix_[k + 1];
    auto it = outer_memo_.lower_bound(r);
    if (it != outer_memo_.end() && it->first <= top_r) {
      top_r = it->first;
      top = it->second;
    }
    const double v = log_add(r < top_r ? log_integrate(f_, r, top_r, rtol_, 200, top).log_value : kNegInf, top);
    outer_memo_.emplace(r, v);
    return v;
  }
  // Beyond the scanned region: sum forward from r until negligible.
  double sum = log_between(r, node(k + 1));
  for (std::size_t j = k + 1, quiet = 0; j < k + 1 + 64 * static_cast<std::size_t>(per_octave_); ++j) {
    double c;
    try {
      c = log_cell(j);
    } catch (const Error& e) {
      if (!is_horizon_error(e.code())) throw;
      break;
    }
    sum = log_add(sum, c);
    quiet = (c == kNegInf || c - sum < std::log(1e-17)) ? quiet + 1 : 0;
    if (quiet >= 2) return sum;
  }
  return sum;
}

ConvergenceVerdict tail_of_volume_ratio(const ModelManifold& M, RatioDirection direction, const TailOptions& user,
                                        double a) {
  // The ratio integrands carry the rounding of log w (about |log w| * eps
  // relative), so they are integrated to a looser tolerance.
  TailOptions opts = user;
  opts.rtol = std::max(opts.rtol, 1e-7);
  opts.max_intervals = std::min(opts.max_intervals, 120);
  auto log_w = [&M](double r) { return M.log_w(r); };
  auto W = std::make_shared<CumulativeIntegral>(log_w);
  if (direction == RatioDirection::Stochastic) {
    return classify_tail([&M, W](double r) { return W->log_inner(r) - M.log_w(r); }, a, opts);
  }
  ConvergenceVerdict wv = classify_tail(log_w, a, opts);
  if (wv.divergent()) {
    ConvergenceVerdict out;
    out.status = Convergence::Divergent;
    out.note = "volume density not integrable; ratio condition trivially satisfied";
    out.log_partial = kInf;
    out.partial_value = kInf;
    return out;
  }
  if (!wv.convergent()) {
    ConvergenceVerdict out;
    out.note = "integrability of the volume density undecided: " + wv.note;
    return out;
  }
  return classify_tail(
      [&M, W](double r) {
        const double o = W->log_outer(r);
        if (o == kInf) throw Error(ErrorCode::EvaluationFailure, "outer volume integral did not settle");
        return o - M.log_w(r);
      },
      a, opts);
}

}  // namespace feller
