#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

#include "feller/corpus.hpp"
#include "feller/heat.hpp"

using namespace feller;

namespace {

const double pi = boost::math::constants::pi<double>();

ModelManifold model(int m, const char* g) { return make_model(m, WarpingFunction::parse(g)); }

// Euclidean heat kernel integrated over the unit ball, seen from the origin.
double gaussian_ball_at_pole(int m, double t) {
  const double area = m == 2 ? 2 * pi : 4 * pi;
  const auto f = [=](double r) { return std::pow(r, m - 1) * std::exp(-r * r / (4 * t)); };
  const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 10, 1e-14);
  return area * q / std::pow(4 * pi * t, 0.5 * m);
}

}  // namespace

TEST_CASE("pole value of the heat flow from the unit ball") {
  for (int m : {2, 3}) {
    CAPTURE(m);
    const auto M = model(m, "r");
    const auto s = evolve(M, InitialData::indicator(1.0), 0.5);
    CHECK(s.richardson_ok);
    CHECK_FALSE(s.wall_too_close);
    CHECK(s.profile.v.front() == doctest::Approx(gaussian_ball_at_pole(m, 0.5)).epsilon(1e-4));
  }
}

TEST_CASE("semigroup composition") {
  const auto M = model(3, "r");
  const auto half = evolve(M, InitialData::indicator(1.0), 0.5);
  const auto twice = evolve(M, InitialData::from_profile(half.profile), 0.5);
  const auto once = evolve(M, InitialData::indicator(1.0), 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < once.profile.size(); ++i) {
    if (once.profile.r[i] > 8.0) break;
    worst = std::max(worst, std::fabs(twice.profile.at(once.profile.r[i]) - once.profile.v[i]));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("mass is conserved on space and never created") {
  const auto M = model(3, "r");
  for (const auto& [t, mass] : mass_history(M, {0.0, 0.5, 1.0, 2.0})) {
    CAPTURE(t);
    CHECK(mass <= 1.0 + 1e-10);
    CHECK(mass >= 1.0 - 1e-6);
  }
  const auto s = evolve(M, InitialData::indicator(1.0), 1.0);
  CHECK(s.mass <= s.initial_mass * (1.0 + 1e-10));
  for (double v : s.profile.v) {
    CHECK(v >= -1e-12);
    CHECK(v <= 1.0 + 1e-10);
  }
}

TEST_CASE("mass escapes to infinity on a stochastically incomplete model") {
  const auto M = make_model(2, WarpingFunction::spliced("r", "exp(r^3)", 1.0, 2.0));
  const auto hist = mass_history(M, {0.5, 2.0});
  CHECK(hist[1].second < hist[0].second);
  CHECK(hist[1].second < 1.0 - 1e-3);
}

TEST_CASE("Feller probes") {
  const auto radii = default_probe_radii(1.0);
  CHECK(radii == std::vector<double>{8.0, 16.0, 32.0, 64.0});
  CHECK(feller_probe(model(3, "r"), 1.0, 1.0, radii).status == Truth::Holds);

  HeatState state;
  const Verdict vs = feller_probe(versus_model(), 1.0, 1.0, radii, {}, &state);
  CHECK(vs.status == Truth::Fails);
  CHECK(state.profile.at(64.0) > 1e-3);
  CHECK(state.profile.at(64.0) == doctest::Approx(state.profile.at(32.0)).epsilon(1e-2));
}
