#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

#include "feller/corpus.hpp"
#include "feller/integrals.hpp"
#include "feller/quadrature.hpp"

using namespace feller;

namespace {

double oracle_tail(const std::function<double(double)>& f, double a) {
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate([&](double u) { return f(a + u); }, 0.0, std::numeric_limits<double>::infinity());
}

}  // namespace

TEST_CASE("log_add and log-domain quadrature") {
  CHECK(log_add(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)));
  CHECK(log_add(-INFINITY, 1.5) == 1.5);
  CHECK(log_add(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
  // int_0^1 e^{-x^2}: erf closed form.
  const auto q = log_integrate([](double x) { return -x * x; }, 0.0, 1.0, 1e-13);
  CHECK(q.converged);
  CHECK(std::exp(q.log_value) == doctest::Approx(0.5 * std::sqrt(M_PI) * std::erf(1.0)).epsilon(1e-12));
  // An integrand far below the double range keeps its log.
  const auto tiny = log_integrate([](double x) { return -5000.0 - x; }, 0.0, 1.0, 1e-12);
  CHECK(tiny.log_value == doctest::Approx(-5000.0 + std::log(1.0 - std::exp(-1.0))).epsilon(1e-14));
}

TEST_CASE("classify_tail on textbook tails") {
  const auto inv2 = classify_tail([](double r) { return -2.0 * std::log(r); }, 1.0);
  CHECK(inv2.convergent());
  CHECK(inv2.partial_value == doctest::Approx(1.0).epsilon(1e-6));

  CHECK(classify_tail([](double r) { return -std::log(r); }, 1.0).divergent());
  CHECK(classify_tail([](double r) { return r * r * r; }, 1.0).divergent());
  CHECK(classify_tail([](double) { return 0.0; }, 1.0).divergent());
}

TEST_CASE("partial values match closed forms and the quadrature oracle") {
  // e^{-c r}
  for (double c : {0.5, 1.0, 3.0}) {
    const auto v = classify_tail([c](double r) { return -c * r; }, 1.0);
    REQUIRE(v.convergent());
    CHECK(v.partial_value == doctest::Approx(std::exp(-c) / c).epsilon(1e-6));
  }
  // r^q e^{-c r}: upper incomplete gamma, and an independent exp-sinh quadrature.
  for (double q : {0.5, 2.0, 5.0}) {
    const double c = 1.5;
    const auto v = classify_tail([=](double r) { return q * std::log(r) - c * r; }, 2.0);
    REQUIRE(v.convergent());
    const double gamma = boost::math::tgamma(q + 1, 2.0 * c) / std::pow(c, q + 1);
    const double quad = oracle_tail([=](double r) { return std::exp(q * std::log(r) - c * r); }, 2.0);
    CHECK(v.partial_value == doctest::Approx(gamma).epsilon(1e-6));
    CHECK(v.partial_value == doctest::Approx(quad).epsilon(1e-6));
  }
  // 1/r^p
  for (double p : {1.5, 3.0, 6.0}) {
    const auto v = classify_tail([p](double r) { return -p * std::log(r); }, 1.0);
    REQUIRE(v.convergent());
    CHECK(v.partial_value == doctest::Approx(1.0 / (p - 1.0)).epsilon(1e-6));
  }
}

TEST_CASE("status is invariant under positive scaling") {
  const std::vector<LogIntegrand> fs{[](double r) { return -2.0 * std::log(r); }, [](double r) { return -std::log(r); },
                                     [](double r) { return -r; }, [](double r) { return r * r; }};
  for (const auto& f : fs) {
    const auto base = classify_tail(f, 1.0).status;
    for (double logc : {-700.0, -50.0, 50.0, 700.0})
      CHECK(classify_tail([&](double r) { return logc + f(r); }, 1.0).status == base);
  }
}

TEST_CASE("monotone comparison: below a convergent tail is never divergent") {
  const auto upper = classify_tail([](double r) { return -1.2 * std::log(r); }, 1.0);
  REQUIRE(upper.convergent());
  for (double p : {1.2, 1.5, 2.0, 4.0}) {
    CHECK_FALSE(classify_tail([p](double r) { return -p * std::log(r) - 0.1 * std::sin(r); }, 1.0).divergent());
  }
}

TEST_CASE("borderline tails are never called convergent") {
  // 1/(r log r) diverges too slowly to resolve with dyadic windows.
  const auto v = classify_tail([](double r) { return -std::log(r) - std::log(std::log(r)); }, 2.0);
  CHECK_FALSE(v.convergent());
}

TEST_CASE("cumulative integrals agree with the oracle") {
  // w = r e^{-r}: int_0^r = 1 - (1+r) e^{-r}.
  CumulativeIntegral W([](double r) { return r == 0.0 ? -INFINITY : std::log(r) - r; });
  for (double r : {0.01, 0.5, 1.0, 7.0, 40.0}) {
    CHECK(std::exp(W.log_inner(r)) == doctest::Approx(1.0 - (1.0 + r) * std::exp(-r)).epsilon(1e-9));
    CHECK(W.log_outer(r) == doctest::Approx(std::log1p(r) - r).epsilon(1e-9));
  }
  CHECK(W.log_total() == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(std::exp(W.log_between(1.0, 2.0)) == doctest::Approx(2.0 * std::exp(-1.0) - 3.0 * std::exp(-2.0)).epsilon(1e-9));
}

TEST_CASE("volume ratio tails") {
  const ModelManifold versus = versus_model();
  const auto fel = tail_of_volume_ratio(versus, RatioDirection::Feller, {}, 10.0);
  REQUIRE(fel.convergent());
  // int_10^inf (int_r^inf e^{-t^3} dt) e^{r^3} dr. With t = r + v / (3 r^2)
  // the inner integral is (3 r^2)^{-1} int_0^inf exp(-v - v^2/(3 r^3) - v^3/(27 r^6)) dv.
  const double oracle = oracle_tail(
      [](double r) {
        if (r > 1e50) return 0.0;  // the remaining tail is below 1e-50
        const double k = 3.0 * r * r * r;
        return oracle_tail([k](double v) { return std::exp(-v - v * v / k - v * v * v / (3.0 * k * k)); }, 0.0) /
               (3.0 * r * r);
      },
      10.0);
  CHECK(fel.partial_value == doctest::Approx(oracle).epsilon(1e-6));

  const auto plane = make_model(2, WarpingFunction::parse("r"));
  const auto triv = tail_of_volume_ratio(plane, RatioDirection::Feller);
  CHECK(triv.divergent());
  CHECK(triv.note.find("trivial") != std::string::npos);

  const auto space = make_model(3, WarpingFunction::parse("r"));
  CHECK(tail_of_volume_ratio(space, RatioDirection::Stochastic).divergent());

  const auto cubic = make_model(2, WarpingFunction::spliced("r", "exp(r^3)", 1.0, 2.0));
  const auto inc = tail_of_volume_ratio(cubic, RatioDirection::Stochastic, {}, 4.0);
  REQUIRE(inc.convergent());
  // int_0^r e^{t^3 - r^3} dt with t = r - v / (3 r^2), v in [0, 3 r^3].
  const double stoch_oracle = oracle_tail(
      [](double r) {
        if (r > 1e50) return 0.0;
        const double k = 3.0 * r * r * r;
        // The integrand is below e^{-k} at v = k, so cutting it there is harmless.
        return oracle_tail([k](double v) { return v > k ? 0.0 : std::exp(-v + v * v / k - v * v * v / (3.0 * k * k)); },
                           0.0) /
               (3.0 * r * r);
      },
      4.0);
  CHECK(inc.partial_value == doctest::Approx(stoch_oracle).epsilon(1e-6));
}
