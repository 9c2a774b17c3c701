// One PASS/FAIL line per acceptance criterion; the exit status is the number of failures.
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "feller/classifier.hpp"
#include "feller/comparison.hpp"
#include "feller/corpus.hpp"
#include "feller/ends.hpp"
#include "feller/exterior.hpp"
#include "feller/heat.hpp"
#include "feller/isoperimetry.hpp"
#include "feller/presets.hpp"
#include "feller/report.hpp"

using namespace feller;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    detail += (detail.empty() ? "" : "; ") + what;
  }
};

int failures = 0;

void criterion(int n, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("threw: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && s > budget_s) o.require(false, "over the " + std::to_string(budget_s) + " s budget");
  if (!o.pass) ++failures;
  std::printf("criterion %2d: %s  %s (%.2f s)%s%s\n", n, o.pass ? "PASS" : "FAIL", title, s,
              o.detail.empty() ? "" : "  ", o.detail.c_str());
  std::fflush(stdout);
}

ModelManifold model(int m, const char* g) { return make_model(m, WarpingFunction::parse(g)); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const Verdict* route_verdict(const Report& r, Route route, const std::string& property) {
  const RouteResult* rr = r.find(route);
  return rr ? rr->find(property) : nullptr;
}

bool is(const Verdict* v, Truth t) { return v && v->status == t; }

}  // namespace

int main() {
  const auto corpus = standard_corpus();
  std::vector<ExhaustionTrace> traces;

  criterion(1, "exterior solution on flat 3-space matches exp(-(r-1))/r", 5.0, [] {
    Outcome o;
    const auto tr = minimal_exterior_solution(model(3, "r"), 1.0, 1.0);
    double worst = 0.0;
    const auto& h = tr.limit();
    for (std::size_t i = 0; i < h.size() && h.r[i] <= 11.0; ++i) {
      const double e = std::exp(-(h.r[i] - 1.0)) / h.r[i];
      worst = std::max(worst, std::fabs(h.v[i] - e) / e);
    }
    o.require(worst <= 1e-4, "relative sup error " + num(worst));
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("sup error ") + num(worst);
    return o;
  });

  criterion(2, "finite-volume non-Feller model across routes", 60.0, [] {
    Outcome o;
    const Report r = run_scenario(find_preset("ex_versus1")->scenario());
    o.require(is(route_verdict(r, Route::Integral, "parabolic"), Truth::Holds), "parabolic is not Holds");
    o.require(is(route_verdict(r, Route::Integral, "feller"), Truth::Fails), "integral feller is not Fails");
    o.require(is(route_verdict(r, Route::Exterior, "feller"), Truth::Fails), "exterior decay verdict is not Fails");
    o.require(is(route_verdict(r, Route::Heat, "feller"), Truth::Fails), "heat probe shows no plateau");
    o.require(r.conflicts() == 0, "cross-validation has conflicts");
    o.require(r.exit_code() == kExitOk, "exit code " + std::to_string(r.exit_code()));
    return o;
  });

  criterion(3, "integral and exterior Feller verdicts agree on the corpus", 0.0, [&] {
    Outcome o;
    int compared = 0;
    for (const auto& e : corpus) {
      traces.push_back(minimal_exterior_solution(e.model, 1.0, 1.0));
      const Verdict a = classify_feller(e.model), b = decay_verdict(traces.back());
      if (!a.conclusive() || !b.conclusive()) continue;
      ++compared;
      o.require(a.status == b.status, e.name + " disagrees");
    }
    o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(compared) + " of " + std::to_string(corpus.size()) +
                " conclusive";
    return o;
  });

  criterion(4, "heat semigroup on flat 3-space", 30.0, [] {
    Outcome o;
    const auto M = model(3, "r");
    const auto half = evolve(M, InitialData::indicator(1.0), 0.5);
    const auto twice = evolve(M, InitialData::from_profile(half.profile), 0.5);
    const auto once = evolve(M, InitialData::indicator(1.0), 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < once.profile.size() && once.profile.r[i] <= 8.0; ++i)
      worst = std::max(worst, std::fabs(twice.profile.at(once.profile.r[i]) - once.profile.v[i]));
    o.require(worst <= 1e-6, "semigroup defect " + num(worst));
    for (const auto& [t, mass] : mass_history(M, {0.5, 1.0, 2.0}))
      o.require(mass <= 1.0 + 1e-10, "mass " + num(mass) + " at t = " + num(t));
    const auto f = [](double r) { return r * r * std::exp(-r * r / 2.0); };
    const double oracle = 4.0 * M_PI * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0) /
                          std::pow(2.0 * M_PI, 1.5);
    const double rel = std::fabs(half.profile.v.front() - oracle) / oracle;
    o.require(rel <= 1e-4, "pole value off by " + num(rel));
    return o;
  });

  criterion(5, "exhaustion monotonicity on the corpus", 0.0, [&] {
    Outcome o;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto c = check_exhaustion(traces.at(i));
      o.require(c.monotone_in_n && c.bounded && c.flux_nondecreasing && c.strictly_decreasing && c.slope_dichotomy,
                corpus[i].name);
    }
    return o;
  });

  criterion(6, "Jacobi solutions for constant curvature", 1.0, [] {
    Outcome o;
    const auto hyp = jacobi_model([](double) { return -1.0; }, 3);
    double worst = 0.0;
    for (double r = 0.01; r <= 10.0; r += 0.01)
      worst = std::max(worst, std::fabs(std::exp(hyp.g().log_g(r)) / std::sinh(r) - 1.0));
    o.require(worst <= 1e-8, "sinh error " + num(worst));
    try {
      (void)jacobi_model([](double) { return 1.0; }, 2);
      o.require(false, "no conjugate point");
    } catch (const ConjugatePointError& e) {
      o.require(std::fabs(e.radius() - M_PI) <= 1e-8, "conjugate point at " + std::to_string(e.radius()));
    }
    return o;
  });

  criterion(7, "Hsu sharpness pair", 30.0, [] {
    Outcome o;
    const auto G = Expr::parse("(1+r)^2");
    o.require(hsu_criterion(G).status == Truth::Inconclusive, "criterion is not silent");
    const HsuSharpness s = hsu_sharpness_model(G, 1.0, 2);
    o.require(s.volume_tail.convergent(), "volume tail check");
    o.require(s.ratio_tail.convergent(), "ratio tail check");
    o.require(classify_feller(s.model).status == Truth::Fails, "generated model is not classified non-Feller");
    return o;
  });

  criterion(8, "warped-line ends", 0.0, [] {
    Outcome o;
    const auto cubic = classify_warped_line(WarpedLine::parse("exp(t^3)", 2));
    o.require(cubic.feller.status == Truth::Fails && cubic.failing_end == 2, "exp(t^3) is not failing at end 2");
    const auto cosh = classify_warped_line(WarpedLine::parse("cosh(t)", 2));
    o.require(cosh.end1.feller.holds() && cosh.end2.feller.holds(), "cosh ends are not Holds/Holds");
    for (const char* f : {"exp(t^3)", "cosh(t)"}) {
      const auto base = classify_warped_line(WarpedLine::parse(f, 2));
      for (const auto& [a, b] : std::vector<std::pair<double, double>>{{0.5, 1.0}, {0.5, 2.0}, {1.0, 2.0}, {1.5, 2.0}}) {
        WarpedLine W = WarpedLine::parse(f, 2);
        W.blend_start = a;
        W.blend_end = b;
        const auto rep = classify_warped_line(W);
        o.require(rep.end1.feller.status == base.end1.feller.status &&
                      rep.end2.feller.status == base.end2.feller.status && rep.feller.status == base.feller.status,
                  std::string(f) + " changes with window [" + num(a) + ", " + num(b) + "]");
      }
    }
    return o;
  });

  criterion(9, "power-law Faber-Krahn profiles", 0.0, [] {
    Outcome o;
    for (int p : {3, 4, 6}) {
      ParamTable params;
      params["p"] = p;
      const auto P = FaberKrahnProfile::parse("s^(-2/p)", params);
      for (double t : {1e-3, 0.1, 1.0, 10.0, 1e3}) {
        const double V = v_from_lambda(P, t);
        const double exact = std::pow(2.0 * t / p, 0.5 * p);
        const std::string at = " (p = " + std::to_string(p) + ", t = " + num(t) + ")";
        o.require(std::fabs(P.t_of_v(V) - t) <= 1e-8 * t, "round trip" + at);
        o.require(std::fabs(V - exact) <= 1e-8 * exact, "V" + at);
        o.require(std::fabs(log_growth_rate(P, t) - 0.5 * p) <= 1e-10, "tV'/V" + at);
      }
    }
    return o;
  });

  criterion(10, "implications between the classifications on the corpus", 0.0, [&] {
    Outcome o;
    for (const auto& e : corpus) {
      const ClassificationReport r = classify(e.model);
      for (const auto& f : r.consistency_flags) o.require(!f.violated, e.name + ": " + f.name);
      o.require(!(r.feller.fails() && r.stochastically_complete.fails()), e.name + ": non-Feller and incomplete");
      o.require(!(r.feller.fails() && r.volume_finite.fails()), e.name + ": non-Feller with infinite volume");
      o.require(!(r.parabolic.holds() && r.stochastically_complete.fails()), e.name + ": parabolic and incomplete");
    }
    return o;
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
