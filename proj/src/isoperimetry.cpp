#include "feller/isoperimetry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "feller/error.hpp"
#include "feller/quadrature.hpp"

namespace feller {

namespace {

constexpr double kSMin = 1e-12;
constexpr int kCellsPerOctave = 16;
constexpr double kRtol = 1e-14;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

// Cells [s_k, s_{k+1}] with s_k = kSMin 2^{k/16}; below kSMin the integrand
// is continued as the power law matching its value and log-slope there.
struct FaberKrahnProfile::Cache {
  std::optional<ConvergenceVerdict> integrability;
  double head_coeff = 0.0;  // int_0^s = head_coeff * s^head_exp for s <= kSMin
  double head_exp = 0.0;
  bool head_ready = false;
  std::vector<double> prefix{0.0};  // int_0^{s_k}, index shifted by head
};

FaberKrahnProfile::FaberKrahnProfile(Expr Lambda, std::string description, double s_max)
    : Lambda_(std::move(Lambda)), description_(std::move(description)), s_max_(s_max),
      cache_(std::make_shared<Cache>()) {
  if (description_.empty()) description_ = "Lambda(s) = " + Lambda_.to_string();
}

FaberKrahnProfile FaberKrahnProfile::parse(std::string_view formula, const ParamTable& params) {
  return FaberKrahnProfile(Expr::parse(formula, "s", params), "Lambda(s) = " + std::string(formula));
}

double FaberKrahnProfile::Lambda(double s) const {
  const double v = Lambda_.eval(s);
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::Inadmissible, "Lambda(" + fmt(s) + ") = " + fmt(v));
  return v;
}

const ConvergenceVerdict& FaberKrahnProfile::integrability() const {
  if (!cache_->integrability) {
    // int_0 ds/(s Lambda) = int^inf dy / Lambda(e^{-y}), evaluated in the
    // log domain so that s far below the double range is still reachable.
    const Expr L = Lambda_.compose(exp(-Expr::variable()));
    cache_->integrability = classify_tail(
        [L](double y) {
          const LogDual d = L.eval_log(y);
          if (d.sv <= 0) throw Error(ErrorCode::EvaluationFailure, "Lambda not positive");
          return -d.lv;
        },
        1.0);
  }
  return *cache_->integrability;
}

double FaberKrahnProfile::t_of_v(double V) const {
  if (!admissible()) throw Error(ErrorCode::Inadmissible, "1/(s Lambda(s)) is not integrable at 0+");
  if (!(V >= 0.0)) throw Error(ErrorCode::Precondition, "volume must be nonnegative");
  if (V > s_max_) throw Error(ErrorCode::DomainExceeded, "V = " + fmt(V) + " beyond s_max");
  if (V == 0.0) return 0.0;
  Cache& c = *cache_;
  const auto phi = [this](double s) { return 1.0 / (s * Lambda(s)); };
  if (!c.head_ready) {
    // Local exponent a with phi ~ s^{a-1}, from the symbolic derivative of Lambda.
    const Dual d = Lambda_.eval_dual(kSMin);
    const double a = -kSMin * d.d / d.v;
    if (!(a > 0.0)) throw Error(ErrorCode::Inadmissible, "integrand not integrable below s_min");
    c.head_exp = a;
    c.head_coeff = phi(kSMin) * kSMin / a / std::pow(kSMin, a);
    c.prefix[0] = phi(kSMin) * kSMin / a;
    c.head_ready = true;
  }
  if (V <= kSMin) return c.head_coeff * std::pow(V, c.head_exp);
  auto node = [](std::size_t k) { return kSMin * std::exp2(double(k) / kCellsPerOctave); };
  const std::size_t k = static_cast<std::size_t>(std::floor(std::log2(V / kSMin) * kCellsPerOctave));
  while (c.prefix.size() <= k) {
    const std::size_t j = c.prefix.size() - 1;
    c.prefix.push_back(c.prefix.back() + integrate_positive(phi, node(j), node(j + 1), kRtol));
  }
  const double a = node(k);
  return c.prefix[k] + (V > a ? integrate_positive(phi, a, V, kRtol) : 0.0);
}

double v_from_lambda(const FaberKrahnProfile& P, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::Precondition, "t must be positive");
  if (!P.admissible()) throw Error(ErrorCode::Inadmissible, "1/(s Lambda(s)) is not integrable at 0+");
  // Bracket in log V.
  double lo = 1.0, hi = 1.0;
  if (P.t_of_v(1.0) < t) {
    while (P.t_of_v(hi) < t) {
      lo = hi;
      hi = std::min(hi * 4.0, P.s_max());
      if (lo == hi) throw Error(ErrorCode::DomainExceeded, "t = " + fmt(t) + " exceeds t(s_max)");
    }
  } else {
    while (P.t_of_v(lo) > t) {
      hi = lo;
      lo *= 0.25;
      if (lo < 1e-300) throw Error(ErrorCode::DomainExceeded, "V(t) underflows");
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = std::sqrt(lo * hi);
    (P.t_of_v(mid) < t ? lo : hi) = mid;
  }
  // Newton on t(V) - t with dt/dV = 1 / (V Lambda(V)).
  double V = std::sqrt(lo * hi);
  for (int i = 0; i < 3; ++i) {
    const double step = (P.t_of_v(V) - t) * V * P.Lambda(V);
    const double next = V - step;
    if (!(next > lo * 0.5 && next < hi * 2)) break;
    V = next;
  }
  return V;
}

double log_growth_rate(const FaberKrahnProfile& P, double t) { return t * P.Lambda(v_from_lambda(P, t)); }

RegularityResult check_regularity(const FaberKrahnProfile& P, double T, double bound) {
  RegularityResult res;
  if (!P.admissible()) {
    res.reason = "profile is not admissible";
    return res;
  }
  for (int k = 0; k <= 240; ++k) {
    const double t = std::pow(10.0, -6.0 + k / 20.0);
    try {
      res.samples.emplace_back(t, log_growth_rate(P, t));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DomainExceeded) break;
      throw;
    }
  }
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& [t, q] : res.samples) {
    if (t <= 2 * T && !(std::fabs(q) <= bound)) {
      res.reason = "tV'/V = " + fmt(q) + " at t = " + fmt(t) + " exceeds the bound";
      return res;
    }
    if (t > T) {
      if (q < prev - 1e-9 * std::fabs(prev)) {
        res.reason = "tV'/V decreases at t = " + fmt(t);
        return res;
      }
      prev = q;
    }
  }
  res.pass = true;
  res.reason = std::isinf(T) ? "bounded on the sampled range" : "bounded on (0, 2T] and nondecreasing beyond T";
  return res;
}

double gaussian_bound(const FaberKrahnProfile& P, const GaussianConstants& k, double d, double t) {
  if (!(k.D > 4.0)) throw Error(ErrorCode::Precondition, "D must exceed 4");
  if (!(t > 0.0)) throw Error(ErrorCode::Precondition, "t must be positive");
  return k.C / v_from_lambda(P, k.c * t) * std::exp(-d * d / (k.D * t));
}

FaberKrahnProfile cheeger_reduce(const Expr& g, std::string description) {
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 480; ++k) {
    const double s = std::pow(10.0, -12.0 + k / 20.0);
    const double q = g.eval(s) / s;
    if (!(q > 0.0)) throw Error(ErrorCode::MonotonicityFailure, "g(s)/s is not positive at s = " + fmt(s));
    if (q > prev * (1 + 1e-12)) throw Error(ErrorCode::MonotonicityFailure, "g(s)/s increases at s = " + fmt(s));
    prev = q;
  }
  const Expr ratio = g / Expr::variable();
  Expr L = Expr::constant(0.25) * ratio * ratio;
  if (description.empty()) description = "Cheeger reduction of g(s) = " + g.to_string();
  return FaberKrahnProfile(std::move(L), std::move(description));
}

Verdict feller_from_faber_krahn(const FaberKrahnProfile& P, double T) {
  const ConvergenceVerdict& adm = P.integrability();
  if (!adm.convergent()) {
    return Verdict::make(Truth::Inconclusive, std::string("1/(s Lambda) at 0+: ") + to_string(adm.status))
        .with("last_log_ratio", adm.last_log_ratio);
  }
  const RegularityResult reg = check_regularity(P, T);
  Verdict v = reg.pass ? Verdict::make(Truth::Holds, "admissible and regular Faber-Krahn profile")
                       : Verdict::make(Truth::Inconclusive, "regularity: " + reg.reason);
  if (!reg.samples.empty()) {
    v.with("tV'/V at t=1e-6", reg.samples.front().second).with("tV'/V at last sample", reg.samples.back().second);
  }
  return v;
}

}  // namespace feller
