#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/tools/roots.hpp>

#include <cmath>

#include "feller/corpus.hpp"
#include "feller/exterior.hpp"

using namespace feller;

namespace {

ModelManifold model(int m, const char* g) { return make_model(m, WarpingFunction::parse(g)); }

double rel_sup(const RadialProfile& p, const std::function<double(double)>& exact, double a, double b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.r[i] < a || p.r[i] > b) continue;
    const double e = exact(p.r[i]);
    worst = std::max(worst, std::fabs(p.v[i] - e) / e);
  }
  return worst;
}

}  // namespace

TEST_CASE("minimal solution in three-dimensional space") {
  const auto trace = minimal_exterior_solution(model(3, "r"), 1.0, 1.0);
  CHECK(trace.converged);
  const auto exact = [](double r) { return std::exp(-(r - 1.0)) / r; };
  CHECK(rel_sup(trace.limit(), exact, 1.0, 11.0) < 1e-4);
  CHECK(trace.inner_slope == doctest::Approx(-2.0).epsilon(1e-3));
  CHECK(decay_verdict(trace).status == Truth::Holds);
}

TEST_CASE("minimal solution in the plane against the Bessel oracle") {
  // h = K0(r) / K0(1); boost's cyl_bessel_k is independent of the solver.
  const auto trace = minimal_exterior_solution(model(2, "r"), 1.0, 1.0);
  const double k1 = std::cyl_bessel_k(0.0, 1.0);
  CHECK(rel_sup(trace.limit(), [k1](double r) { return std::cyl_bessel_k(0.0, r) / k1; }, 1.0, 11.0) < 1e-4);
}

TEST_CASE("the exterior solution stays below a supersolution") {
  // e^{-(r-1)} satisfies Delta u = (1 - 2/r) u <= u for g = r, m = 3.
  const auto trace = minimal_exterior_solution(model(3, "r"), 1.0, 1.0);
  RadialProfile u;
  for (double r = 1.0; r <= 50.0; r += 0.05) {
    u.r.push_back(r);
    u.v.push_back(std::exp(-(r - 1.0)));
  }
  CHECK(dominated_by(trace, u, 1e-6));
}

TEST_CASE("exhaustion is monotone on every corpus model") {
  for (const auto& e : standard_corpus()) {
    CAPTURE(e.name);
    const auto trace = minimal_exterior_solution(e.model, 1.0, 1.0);
    const auto c = check_exhaustion(trace);
    CHECK(c.monotone_in_n);
    CHECK(c.bounded);
    CHECK(c.flux_nondecreasing);
    CHECK(c.strictly_decreasing);
    CHECK(c.slope_dichotomy);
    // Differences of subnormal values carry no digits, so the check stops there.
    const auto flux = discrete_flux(trace);
    const auto& h = trace.limit().v;
    for (std::size_t i = 1; i < flux.size() && h[i + 1] > 1e-250; ++i)
      CHECK(flux[i] >= flux[i - 1] - 1e-9 * std::fabs(flux[i - 1]));
  }
}

TEST_CASE("decay verdicts") {
  CHECK(decay_verdict(minimal_exterior_solution(model(3, "sinh(r)"), 1.0, 1.0)).status == Truth::Holds);
  const auto vs = minimal_exterior_solution(versus_model(), 1.0, 1.0);
  const Verdict v = decay_verdict(vs);
  CHECK(v.status == Truth::Fails);
  CHECK(vs.far_value > 1e-3);
}

TEST_CASE("annulus solve with a Neumann wall") {
  // With q = 0 and h'(Rn) = 0 the solution is constant.
  const auto p = solve_annulus(model(3, "r"), 1.0, 4.0, [](double) { return 0.0; }, 1.0, 0.0, {}, true);
  for (double v : p.v) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
  // Harmonic with Dirichlet data: h = (1/r - 1/4) / (1 - 1/4).
  const auto d = solve_annulus(model(3, "r"), 1.0, 4.0, [](double) { return 0.0; }, 1.0, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i)
    CHECK(d.v[i] == doctest::Approx((1.0 / d.r[i] - 0.25) / 0.75).scale(1.0).epsilon(1e-5));
}

TEST_CASE("Cauchy and regular solutions") {
  const auto reg = regular_solution(model(3, "r"), 1.0, 8.0);
  double worst = 0.0;
  for (std::size_t i = 1; i < reg.profile.size(); ++i) {
    const double r = reg.profile.r[i];
    worst = std::max(worst, std::fabs(reg.profile.v[i] * r / std::sinh(r) - 1.0));
  }
  CHECK(worst < 1e-6);

  // Slope -2 at R0 = 1 selects the decaying solution e^{-(r-1)}/r.
  const auto dec = cauchy_solution(model(3, "r"), 1.0, 1.0, -2.0, 5.0);
  CHECK(dec.profile.at(5.0) == doctest::Approx(std::exp(-4.0) / 5.0).epsilon(1e-5));

  // A shooting root on alpha recovers the exterior slope.
  const auto M = model(3, "r");
  const auto end_value = [&](double a) { return cauchy_solution(M, 1.0, 1.0, a, 6.0).profile.v.back(); };
  boost::uintmax_t it = 60;
  const auto [lo, hi] =
      boost::math::tools::bisect(end_value, -3.0, -1.0, boost::math::tools::eps_tolerance<double>(30), it);
  CHECK(0.5 * (lo + hi) == doctest::Approx(-2.0).epsilon(1e-3));

  const auto blow = cauchy_solution(model(2, "sinh(r)"), 1.0, 1.0, 1.0, 2000.0);
  CHECK(blow.truncated);
}
