#include "feller/classifier.hpp"

#include <cmath>
#include <limits>

#include "feller/error.hpp"

namespace feller {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void attach(Verdict& v, const ConvergenceVerdict& c, const std::string& prefix) {
  v.with(prefix + "_windows", static_cast<double>(c.windows.size()));
  v.with(prefix + "_last_log_ratio", c.last_log_ratio);
  if (c.convergent()) v.with(prefix + "_integral", c.partial_value);
}

ConvergenceVerdict inverse_density_tail(const ModelManifold& M, const ClassifierOptions& opts) {
  return classify_tail([&M](double r) { return -M.log_w(r); }, opts.lower_limit, opts.tail);
}

ConvergenceVerdict density_tail(const ModelManifold& M, const ClassifierOptions& opts) {
  return classify_tail([&M](double r) { return M.log_w(r); }, opts.lower_limit, opts.tail);
}

}  // namespace

Verdict classify_parabolic(const ModelManifold& M, const ClassifierOptions& opts) {
  const ConvergenceVerdict c = inverse_density_tail(M, opts);
  Verdict v;
  switch (c.status) {
    case Convergence::Divergent: v = Verdict::make(Truth::Holds, "1/g^{m-1} not integrable at infinity"); break;
    case Convergence::Convergent: v = Verdict::make(Truth::Fails, "1/g^{m-1} integrable at infinity"); break;
    case Convergence::Inconclusive: v = Verdict::make(Truth::Inconclusive, "1/g^{m-1} tail undecided: " + c.note); break;
  }
  attach(v, c, "inv_density");
  return v;
}

Verdict classify_stochastically_complete(const ModelManifold& M, const ClassifierOptions& opts) {
  const ConvergenceVerdict c = tail_of_volume_ratio(M, RatioDirection::Stochastic, opts.tail, opts.lower_limit);
  Verdict v;
  switch (c.status) {
    case Convergence::Divergent: v = Verdict::make(Truth::Holds, "inner volume ratio not integrable"); break;
    case Convergence::Convergent: v = Verdict::make(Truth::Fails, "inner volume ratio integrable"); break;
    case Convergence::Inconclusive: v = Verdict::make(Truth::Inconclusive, "inner volume ratio undecided: " + c.note); break;
  }
  attach(v, c, "inner_ratio");
  return v;
}

Verdict classify_feller(const ModelManifold& M, const ClassifierOptions& opts) {
  const ConvergenceVerdict inv = inverse_density_tail(M, opts);
  const ConvergenceVerdict ratio = tail_of_volume_ratio(M, RatioDirection::Feller, opts.tail, opts.lower_limit);
  Verdict v;
  if (inv.convergent() && ratio.convergent())
    throw Error(ErrorCode::InternalConsistency,
                "both 1/g^{m-1} and g^{m-1} classified integrable; this contradicts Cauchy-Schwarz");
  if (inv.convergent()) {
    v = Verdict::make(Truth::Holds, "1/g^{m-1} integrable at infinity");
  } else if (ratio.divergent()) {
    v = Verdict::make(Truth::Holds, ratio.log_partial == kInf ? "infinite volume: outer ratio condition trivially satisfied"
                                                               : "outer volume ratio not integrable");
  } else if (ratio.convergent()) {
    // Integrable outer ratio forces finite volume, hence 1/g^{m-1} not integrable.
    v = Verdict::make(Truth::Fails, "1/g^{m-1} not integrable and outer volume ratio integrable");
  } else {
    v = Verdict::make(Truth::Inconclusive, "neither branch conclusive: " + ratio.note);
  }
  attach(v, inv, "inv_density");
  attach(v, ratio, "outer_ratio");
  return v;
}

Verdict classify_volume_finite(const ModelManifold& M, const ClassifierOptions& opts) {
  const ConvergenceVerdict c = density_tail(M, opts);
  Verdict v;
  switch (c.status) {
    case Convergence::Convergent: v = Verdict::make(Truth::Holds, "g^{m-1} integrable"); break;
    case Convergence::Divergent: v = Verdict::make(Truth::Fails, "g^{m-1} not integrable"); break;
    case Convergence::Inconclusive: v = Verdict::make(Truth::Inconclusive, "volume undecided: " + c.note); break;
  }
  attach(v, c, "density");
  return v;
}

VolumeValues volume_functions(const ModelManifold& M, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::Precondition, "volume_functions needs r > 0");
  VolumeValues out;
  const double lc = M.log_sphere_constant();
  out.area = std::exp(lc + M.log_w(r));
  CumulativeIntegral W([&M](double x) { return M.log_w(x); });
  const double lo = W.log_outer(r);
  out.residual_volume = lo == kInf ? kInf : std::exp(lc + lo);
  out.residual_known = true;
  return out;
}

GreenValue green_kernel(const ModelManifold& M, double r, const ClassifierOptions& opts) {
  if (!(r > 0.0)) throw Error(ErrorCode::Precondition, "green_kernel needs r > 0");
  const Verdict p = classify_parabolic(M, opts);
  if (p.holds()) return {GreenValue::Kind::Infinite, kInf};
  if (!p.fails()) return {GreenValue::Kind::Unknown, std::numeric_limits<double>::quiet_NaN()};
  CumulativeIntegral inv([&M](double x) { return -M.log_w(x); });
  const double lo = inv.log_outer(r);
  if (lo == kInf) return {GreenValue::Kind::Unknown, std::numeric_limits<double>::quiet_NaN()};
  return {GreenValue::Kind::Finite, std::exp(lo)};
}

bool ClassificationReport::consistent() const {
  for (const auto& f : consistency_flags)
    if (f.violated) return false;
  return true;
}

ClassificationReport classify(const ModelManifold& M, const ClassifierOptions& opts) {
  ClassificationReport rep;
  rep.parabolic = classify_parabolic(M, opts);
  rep.stochastically_complete = classify_stochastically_complete(M, opts);
  rep.feller = classify_feller(M, opts);
  rep.volume_finite = classify_volume_finite(M, opts);

  if (rep.volume_finite.fails()) {
    rep.volume_value = kInf;
  } else if (rep.volume_finite.holds()) {
    CumulativeIntegral W([&M](double x) { return M.log_w(x); });
    const double lt = W.log_total();
    rep.volume_value = lt == kInf ? std::numeric_limits<double>::quiet_NaN() : std::exp(M.log_sphere_constant() + lt);
  } else {
    rep.volume_value = std::numeric_limits<double>::quiet_NaN();
  }

  if (rep.parabolic.fails()) {
    CumulativeIntegral inv([&M](double x) { return -M.log_w(x); });
    for (double r : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
      try {
        const double lo = inv.log_outer(r);
        if (lo != kInf) rep.green_kernel_at.emplace_back(r, std::exp(lo));
      } catch (const Error&) {
        break;
      }
    }
  }

  auto flag = [&rep](std::string name, bool violated, std::string detail) {
    rep.consistency_flags.push_back({std::move(name), violated, std::move(detail)});
  };
  flag("parabolic_implies_stochastically_complete", rep.parabolic.holds() && rep.stochastically_complete.fails(),
       "parabolic models are stochastically complete");
  flag("stochastically_incomplete_implies_feller", rep.stochastically_complete.fails() && rep.feller.fails(),
       "stochastically incomplete models are Feller");
  flag("infinite_volume_implies_feller", rep.volume_finite.fails() && rep.feller.fails(),
       "infinite volume models are Feller");
  bool green_vanishes = false;
  if (rep.green_kernel_at.size() >= 2) {
    const double first = rep.green_kernel_at.front().second, last = rep.green_kernel_at.back().second;
    green_vanishes = last < 1e-3 * first;
  }
  flag("vanishing_green_kernel_implies_feller", rep.parabolic.fails() && green_vanishes && rep.feller.fails(),
       "non-parabolic models whose Green kernel vanishes at infinity are Feller");
  return rep;
}

}  // namespace feller
