#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>

#include "feller/error.hpp"
#include "feller/isoperimetry.hpp"

using namespace feller;

namespace {

FaberKrahnProfile power(int p) {
  ParamTable params;
  params["p"] = p;
  return FaberKrahnProfile::parse("s^(-2/p)", params);
}

bool throws_code(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("power profiles invert in closed form") {
  for (int p : {3, 4, 6}) {
    CAPTURE(p);
    const auto P = power(p);
    REQUIRE(P.admissible());
    for (double t : {1e-3, 0.1, 1.0, 10.0, 1e3}) {
      CAPTURE(t);
      const double V = v_from_lambda(P, t);
      CHECK(V == doctest::Approx(std::pow(2 * t / p, 0.5 * p)).epsilon(1e-8));
      CHECK(P.t_of_v(V) == doctest::Approx(t).epsilon(1e-8));
      CHECK(std::fabs(log_growth_rate(P, t) - 0.5 * p) <= 1e-10);
    }
  }
}

TEST_CASE("t(V) against quadrature") {
  // A profile without a closed-form inverse: Lambda = s^{-1/2} + s^{-1}.
  const auto P = FaberKrahnProfile::parse("s^(-1/2)+s^(-1)");
  REQUIRE(P.admissible());
  boost::math::quadrature::tanh_sinh<double> q;
  for (double V : {0.01, 1.0, 50.0}) {
    const double oracle = q.integrate([](double s) { return 1.0 / (std::sqrt(s) + 1.0); }, 0.0, V);
    CHECK(P.t_of_v(V) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(v_from_lambda(P, oracle) == doctest::Approx(V).epsilon(1e-8));
  }
}

TEST_CASE("inadmissible profiles") {
  const auto flat = FaberKrahnProfile::parse("1");
  CHECK_FALSE(flat.admissible());
  CHECK(throws_code(ErrorCode::Inadmissible, [&] { (void)flat.t_of_v(1.0); }));
  CHECK(throws_code(ErrorCode::Inadmissible, [&] { (void)v_from_lambda(flat, 1.0); }));
  CHECK(feller_from_faber_krahn(flat).status == Truth::Inconclusive);
}

TEST_CASE("regularity and the Feller verdict") {
  for (int p : {3, 4, 6}) {
    const auto P = power(p);
    const auto reg = check_regularity(P);
    CHECK(reg.pass);
    CHECK_FALSE(reg.samples.empty());
    for (const auto& [t, rate] : reg.samples) CHECK(rate == doctest::Approx(0.5 * p).epsilon(1e-8));
    CHECK(check_regularity(P, 1.0).pass);
    CHECK(feller_from_faber_krahn(P).status == Truth::Holds);
  }
}

TEST_CASE("Cheeger reduction") {
  // g(s) = 2 s^{2/3} gives Lambda = s^{-2/3}, the p = 3 profile.
  const auto P = cheeger_reduce(Expr::parse("2*s^(2/3)", "s"));
  const auto ref = power(3);
  for (double s : {0.01, 1.0, 100.0}) CHECK(P.Lambda(s) == doctest::Approx(ref.Lambda(s)).epsilon(1e-12));
  CHECK(throws_code(ErrorCode::MonotonicityFailure, [] { (void)cheeger_reduce(Expr::parse("s^2", "s")); }));
}

TEST_CASE("Gaussian bound") {
  const auto P = power(4);
  const GaussianConstants k{2.0, 0.5, 8.0};
  for (double t : {0.1, 1.0, 10.0}) {
    const double V = std::pow(2 * 0.5 * t / 4, 2.0);
    CHECK(gaussian_bound(P, k, 3.0, t) == doctest::Approx(2.0 / V * std::exp(-9.0 / (8.0 * t))).epsilon(1e-8));
  }
  CHECK_THROWS_AS((void)gaussian_bound(P, GaussianConstants{1.0, 1.0, 4.0}, 1.0, 1.0), Error);
}
