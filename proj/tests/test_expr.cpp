#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "feller/error.hpp"
#include "feller/expr.hpp"

using feller::Expr;

TEST_CASE("parse and evaluate basic arithmetic") {
  CHECK(Expr::parse("1 + 2 * 3").eval(0) == doctest::Approx(7.0));
  CHECK(Expr::parse("2^3^2").eval(0) == doctest::Approx(512.0));
  CHECK(Expr::parse("-r^2").eval(3) == doctest::Approx(-9.0));
  CHECK(Expr::parse("pow(r, 0.5) + sqrt(r)").eval(4) == doctest::Approx(4.0));
  CHECK(Expr::parse("1.5e2 + .5").eval(0) == doctest::Approx(150.5));
  CHECK(Expr::parse("a*r", "r", {{"a", 2.5}}).eval(2) == doctest::Approx(5.0));
  CHECK(Expr::parse("exp(1) - e").eval(0) == doctest::Approx(0.0));
  CHECK(Expr::parse("s^2", "s").eval(3) == doctest::Approx(9.0));
}

TEST_CASE("parse errors name the token") {
  try {
    (void)Expr::parse("exp(r) + foo");
    FAIL("expected ParseError");
  } catch (const feller::ParseError& e) {
    CHECK(e.token() == "foo");
    CHECK(e.position() == 9);
  }
  CHECK_THROWS_AS((void)Expr::parse("(r + 1"), feller::ParseError);
  CHECK_THROWS_AS((void)Expr::parse("r +"), feller::ParseError);
  CHECK_THROWS_AS((void)Expr::parse("blah(r)"), feller::ParseError);
  CHECK_THROWS_AS((void)Expr::parse("pow(r)"), feller::ParseError);
  CHECK_THROWS_AS((void)Expr::parse("r $ 2"), feller::ParseError);
}

TEST_CASE("symbolic derivative agrees with central differences") {
  const char* formulas[] = {"sinh(r)", "r*exp(-r^3)", "cosh(r)^2/(1+r)", "log(1+r^2)*tanh(r)",
                            "sin(r)+cos(2*r)", "pow(r, r)", "sqrt(1+r)"};
  for (const char* f : formulas) {
    const Expr e = Expr::parse(f);
    const Expr d = e.derivative();
    for (double x : {0.3, 1.0, 2.7}) {
      const double h = 1e-6;
      const double fd = (e.eval(x + h) - e.eval(x - h)) / (2 * h);
      CHECK(d.eval(x) == doctest::Approx(fd).epsilon(1e-6));
      CHECK(e.eval_dual(x).d == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("log-domain evaluation survives underflow") {
  const Expr e = Expr::parse("exp(-r^3)");
  const auto v = e.eval_log(20.0);
  CHECK(v.sv == 1);
  CHECK(v.lv == doctest::Approx(-8000.0));
  CHECK(v.sd == -1);
  CHECK(v.ld - v.lv == doctest::Approx(std::log(1200.0)));
  const auto s = Expr::parse("sinh(r)").eval_log(1000.0);
  CHECK(s.lv == doctest::Approx(1000.0 - std::log(2.0)));
  CHECK(s.log_derivative() == doctest::Approx(1.0));
  const auto big = Expr::parse("exp(r^3) * r").eval_log(30.0);
  CHECK(big.lv == doctest::Approx(27000.0 + std::log(30.0)));
}

TEST_CASE("compose substitutes the variable") {
  const Expr f = Expr::parse("exp(r^3)");
  const Expr g = f.compose(-Expr::variable());
  CHECK(g.eval(1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(g.eval_log(10.0).lv == doctest::Approx(-1000.0));
}
