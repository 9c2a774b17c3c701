#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "feller/ends.hpp"
#include "feller/error.hpp"
#include "feller/exterior.hpp"

using namespace feller;

namespace {

WarpedLine line(const char* f, double a, double b, int m = 2) {
  WarpedLine W = WarpedLine::parse(f, m);
  W.blend_start = a;
  W.blend_end = b;
  return W;
}

}  // namespace

TEST_CASE("exp(t^3): the decaying end fails") {
  const auto rep = classify_warped_line(WarpedLine::parse("exp(t^3)", 2));
  CHECK(rep.feller.status == Truth::Fails);
  CHECK(rep.failing_end == 2);
  CHECK(rep.end1.feller.status == Truth::Holds);
  CHECK(rep.end2.feller.status == Truth::Fails);
  CHECK(rep.end2.volume_finite.status == Truth::Holds);
  CHECK(rep.end1.stochastically_complete.status == Truth::Fails);
}

TEST_CASE("cosh: both ends hold") {
  const auto rep = classify_warped_line(WarpedLine::parse("cosh(t)", 3));
  CHECK(rep.end1.feller.status == Truth::Holds);
  CHECK(rep.end2.feller.status == Truth::Holds);
  CHECK(rep.feller.status == Truth::Holds);
  CHECK(rep.failing_end == 0);
}

TEST_CASE("end models follow f beyond the window") {
  const auto ends = split_ends(WarpedLine::parse("exp(t^3)", 2));
  CHECK(ends.end1.g().log_g(3.0) == doctest::Approx(27.0));
  CHECK(ends.end2.g().log_g(3.0) == doctest::Approx(-27.0));
  CHECK(ends.end1.g().log_g(0.25) == doctest::Approx(std::log(0.25)));

  WarpedLine W = WarpedLine::parse("exp(t^3)", 2);
  W.tail_neg = Expr::parse("exp(-2*r^3)");
  CHECK(split_ends(W).end2.g().log_g(3.0) == doctest::Approx(-54.0));
}

TEST_CASE("verdicts do not depend on the blend window") {
  for (const char* f : {"exp(t^3)", "cosh(t)", "exp(t)"}) {
    const auto base = classify_warped_line(line(f, 0.5, 1.5));
    for (const auto& [a, b] : std::vector<std::pair<double, double>>{{0.5, 1.0}, {0.5, 2.0}, {1.0, 2.0}, {0.75, 1.25}}) {
      CAPTURE(f);
      CAPTURE(a);
      CAPTURE(b);
      const auto rep = classify_warped_line(line(f, a, b));
      CHECK(rep.feller.status == base.feller.status);
      CHECK(rep.failing_end == base.failing_end);
      CHECK(rep.end1.feller.status == base.end1.feller.status);
      CHECK(rep.end2.feller.status == base.end2.feller.status);
    }
  }
}

TEST_CASE("the exterior route agrees on the failing end") {
  const auto ends = split_ends(WarpedLine::parse("exp(t^3)", 2));
  CHECK(decay_verdict(minimal_exterior_solution(ends.end2, 1.0, 1.0)).status == Truth::Fails);
  CHECK(decay_verdict(minimal_exterior_solution(ends.end1, 1.0, 1.0)).status != Truth::Fails);
}

TEST_CASE("f must stay positive") {
  try {
    (void)split_ends(WarpedLine::parse("t", 2));
    FAIL("expected NonPositive");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositive);
  }
}

TEST_CASE("combining end verdicts") {
  const Verdict h = Verdict::make(Truth::Holds, "h"), f = Verdict::make(Truth::Fails, "f"),
                i = Verdict::make(Truth::Inconclusive, "i");
  CHECK(combine_end_verdicts({h, h}).status == Truth::Holds);
  CHECK(combine_end_verdicts({h, i}).status == Truth::Inconclusive);
  CHECK(combine_end_verdicts({i, f}).status == Truth::Fails);
}
