#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "feller/error.hpp"
#include "feller/warping.hpp"

using namespace feller;

namespace {

bool throws_code(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("eval_log of sinh, identity and the cubic decay tail") {
  const auto s = WarpingFunction::parse("sinh(r)").eval_log(1.0);
  CHECK(s.valid);
  CHECK(s.log_g == doctest::Approx(std::log(std::sinh(1.0))).epsilon(1e-14));
  CHECK(s.dlog_g == doctest::Approx(1.0 / std::tanh(1.0)).epsilon(1e-14));

  const auto id = WarpingFunction::parse("r").eval_log(1.0);
  CHECK(id.log_g == doctest::Approx(0.0));
  CHECK(id.dlog_g == doctest::Approx(1.0));

  const auto g = WarpingFunction::spliced("r", "exp(-r^3)", 1.0, 10.0);
  const auto v = g.eval_log(20.0);
  CHECK(v.log_g == doctest::Approx(-8000.0).epsilon(1e-14));
  CHECK(v.dlog_g == doctest::Approx(-1200.0).epsilon(1e-12));
  CHECK_FALSE(v.valid);  // e^{-8000} is not a double
}

TEST_CASE("derivatives are exact, not differenced") {
  for (const char* f : {"sinh(r)", "r*exp(-r^2)", "r*(1+r^2)", "tanh(r)*cosh(2*r)"}) {
    const auto g = WarpingFunction::parse(f);
    for (double r = 0.25; r < 4.0; r += 0.25) {
      const double h = 1e-5 * r;
      const double fd = (g.log_g(r + h) - g.log_g(r - h)) / (2 * h);
      CHECK(g.jet(r).d1 == doctest::Approx(fd).epsilon(1e-6));
      const double fd2 = (g.jet(r + h).d1 - g.jet(r - h).d1) / (2 * h);
      CHECK(g.jet(r).d2 == doctest::Approx(fd2).epsilon(1e-5));
    }
  }
}

TEST_CASE("blend keeps log g and its slope continuous") {
  const auto g = WarpingFunction::spliced("r", "exp(-r^3)", 1.0, 2.0);
  double worst_jump = 0.0, worst_slope = 0.0;
  for (double r = 0.9; r < 2.1; r += 1e-3) {
    const double h = 1e-7;
    worst_jump = std::max(worst_jump, std::fabs(g.log_g(r + h) - g.log_g(r)));
    worst_slope = std::max(worst_slope, std::fabs(g.jet(r + h).d1 - g.jet(r).d1));
  }
  CHECK(worst_jump < 1e-5);
  CHECK(worst_slope < 1e-4);
  // Outside the window each piece is reproduced exactly.
  CHECK(g.log_g(0.5) == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(g.log_g(3.0) == doctest::Approx(-27.0).epsilon(1e-15));
  CHECK(g.with_window(1.0, 4.0).blend_end() == 4.0);
}

TEST_CASE("exp((m-1) log g) reproduces g^(m-1)") {
  const auto g = WarpingFunction::parse("sinh(r)");
  const auto M = make_model(4, g);
  for (double r : {0.1, 1.0, 5.0, 20.0}) {
    const double direct = std::pow(std::sinh(r), 3);
    CHECK(std::exp(M.log_w(r)) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("make_model validates the pole and positivity") {
  CHECK_NOTHROW((void)make_model(3, WarpingFunction::parse("sinh(r)")));
  CHECK_NOTHROW((void)make_model(2, WarpingFunction::spliced("r", "exp(-r^3)", 1.0, 10.0)));
  CHECK(throws_code(ErrorCode::PoleViolation, [] { (void)make_model(2, WarpingFunction::parse("r^2")); }));
  CHECK(throws_code(ErrorCode::PoleViolation, [] { (void)make_model(2, WarpingFunction::parse("2*r")); }));
  CHECK(throws_code(ErrorCode::PoleViolation, [] { (void)make_model(2, WarpingFunction::parse("1+r")); }));
  CHECK(throws_code(ErrorCode::NonPositive, [] { (void)make_model(2, WarpingFunction::parse("sin(r)")); }));
  CHECK(throws_code(ErrorCode::ValidationError, [] { (void)make_model(1, WarpingFunction::parse("r")); }));
}

TEST_CASE("eval_log raises on a non-positive value") {
  const auto g = WarpingFunction::parse("sin(r)");
  CHECK(throws_code(ErrorCode::NonPositiveValue, [&] { (void)g.eval_log(4.0); }));
}

TEST_CASE("sphere constants") {
  const double pi = boost::math::constants::pi<double>();
  CHECK(sphere_constant(2) == doctest::Approx(2 * pi).epsilon(1e-15));
  CHECK(sphere_constant(3) == doctest::Approx(4 * pi).epsilon(1e-15));
  CHECK(sphere_constant(4) == doctest::Approx(2 * pi * pi).epsilon(1e-15));
  for (int m = 2; m <= 12; ++m) {
    const double oracle = 2 * std::pow(pi, 0.5 * m) / boost::math::tgamma(0.5 * m);
    CHECK(sphere_constant(m) == doctest::Approx(oracle).epsilon(1e-13));
  }
}

TEST_CASE("tables interpolate log g and refuse to extrapolate") {
  std::vector<double> r, g;
  for (int i = 0; i <= 400; ++i) {
    const double x = 0.01 * i;
    r.push_back(x);
    g.push_back(std::sinh(x));
  }
  const WarpingFunction w(WarpingSource::from_table(r, g));
  for (double x : {0.005, 0.5, 1.234, 3.99})
    CHECK(std::exp(w.log_g(x)) == doctest::Approx(std::sinh(x)).epsilon(1e-6));
  CHECK(throws_code(ErrorCode::DomainExceeded, [&] { (void)w.log_g(5.0); }));
  CHECK_NOTHROW((void)make_model(2, w));

  const WarpingFunction tailed(WarpingSource::from_table(r, g), WarpingSource::from_formula("sinh(r)"), 2.0, 3.0);
  CHECK(std::exp(tailed.log_g(10.0)) == doctest::Approx(std::sinh(10.0)).epsilon(1e-12));
}

TEST_CASE("tables load from CSV with a header") {
  const auto path = std::filesystem::temp_directory_path() / "feller_table_test.csv";
  {
    std::ofstream out(path);
    out << "r,g\n";
    for (int i = 0; i <= 200; ++i) out << 0.01 * i << "," << 0.01 * i * (1 + 0.01 * i) << "\n";
  }
  const WarpingFunction w(load_table_csv(path.string()));
  CHECK(std::exp(w.log_g(1.5)) == doctest::Approx(1.5 * 2.5).epsilon(1e-6));
  std::filesystem::remove(path);
}
