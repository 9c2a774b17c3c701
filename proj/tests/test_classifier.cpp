#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

#include "feller/classifier.hpp"
#include "feller/corpus.hpp"
#include "feller/error.hpp"

using namespace feller;

namespace {

const double pi = boost::math::constants::pi<double>();

ModelManifold model(int m, const char* g) { return make_model(m, WarpingFunction::parse(g)); }
ModelManifold spliced(int m, const char* tail, double a = 1.0, double b = 2.0) {
  return make_model(m, WarpingFunction::spliced("r", tail, a, b));
}

}  // namespace

TEST_CASE("parabolicity") {
  CHECK(classify_parabolic(model(2, "r")).status == Truth::Holds);
  CHECK(classify_parabolic(model(3, "r")).status == Truth::Fails);
  CHECK(classify_parabolic(versus_model()).status == Truth::Holds);
}

TEST_CASE("stochastic completeness") {
  CHECK(classify_stochastically_complete(model(3, "r")).status == Truth::Holds);
  CHECK(classify_stochastically_complete(spliced(2, "exp(r^3)")).status == Truth::Fails);
  CHECK(classify_stochastically_complete(versus_model()).status == Truth::Holds);
}

TEST_CASE("Feller property") {
  const Verdict hyp = classify_feller(model(3, "sinh(r)"));
  CHECK(hyp.status == Truth::Holds);
  CHECK(hyp.basis.find("1/g^{m-1} integrable") != std::string::npos);
  CHECK(classify_feller(versus_model()).status == Truth::Fails);
  const Verdict plane = classify_feller(model(2, "r"));
  CHECK(plane.status == Truth::Holds);
  CHECK(plane.basis.find("trivially") != std::string::npos);
}

TEST_CASE("volume functions") {
  const auto euclid = volume_functions(model(3, "r"), 2.0);
  CHECK(euclid.area == doctest::Approx(16 * pi).epsilon(1e-14));
  CHECK(std::isinf(euclid.residual_volume));

  // g = exp(-r^3) beyond r = 2: 2 pi int_2^inf e^{-t^3} dt = 2 pi Gamma(1/3, 8) / 3.
  const auto v = volume_functions(versus_model(1.0, 3.0, 2, 1.0, 2.0), 2.0);
  REQUIRE(v.residual_known);
  CHECK(v.residual_volume == doctest::Approx(2 * pi * boost::math::tgamma(1.0 / 3.0, 8.0) / 3.0).epsilon(1e-8));
  CHECK(v.area == doctest::Approx(2 * pi * std::exp(-8.0)).epsilon(1e-12));

  const auto plane = volume_functions(model(2, "r"), 5.0);
  CHECK(std::isinf(plane.residual_volume));
  CHECK(plane.area == doctest::Approx(10 * pi));
}

TEST_CASE("Green kernel") {
  const auto e3 = green_kernel(model(3, "r"), 2.0);
  REQUIRE(e3.finite());
  CHECK(e3.value == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(green_kernel(model(2, "r"), 3.0).kind == GreenValue::Kind::Infinite);
  const auto h3 = green_kernel(model(3, "sinh(r)"), 1.0);
  REQUIRE(h3.finite());
  CHECK(h3.value == doctest::Approx(1.0 / std::tanh(1.0) - 1.0).epsilon(1e-8));
}

TEST_CASE("the corpus reproduces its closed-form classifications") {
  const auto corpus = standard_corpus();
  REQUIRE(corpus.size() == 12);
  for (const auto& e : corpus) {
    CAPTURE(e.name);
    const ClassificationReport r = classify(e.model);
    CHECK(r.parabolic.status == e.parabolic);
    CHECK(r.stochastically_complete.status == e.stochastically_complete);
    CHECK(r.feller.status == e.feller);
    CHECK(r.volume_finite.status == e.volume_finite);
    CHECK(r.consistent());
  }
}

TEST_CASE("implication suite on the corpus") {
  for (const auto& e : standard_corpus()) {
    CAPTURE(e.name);
    const ClassificationReport r = classify(e.model);
    for (const auto& f : r.consistency_flags) {
      CAPTURE(f.name);
      CHECK_FALSE(f.violated);
    }
    if (r.stochastically_complete.fails()) CHECK_FALSE(r.feller.fails());
    if (r.volume_finite.fails()) CHECK_FALSE(r.feller.fails());
    if (r.parabolic.holds()) CHECK_FALSE(r.stochastically_complete.fails());
    if (r.parabolic.fails() && !r.green_kernel_at.empty() && r.green_kernel_at.back().second < 1e-3)
      CHECK(r.feller.holds());
  }
}

TEST_CASE("the Feller verdict ignores a constant factor on the tail") {
  for (const char* tail : {"exp(-r^3)", "exp(-r^2)", "exp(r^3)", "r^2"}) {
    const Truth base = classify_feller(spliced(2, tail)).status;
    for (const char* c : {"1e-3*", "1e3*"}) {
      CAPTURE(tail);
      CAPTURE(c);
      const std::string scaled = std::string(c) + tail;
      CHECK(classify_feller(make_model(2, WarpingFunction::spliced("r", scaled, 1.0, 2.0))).status == base);
    }
  }
}

TEST_CASE("combine_all: Fails dominates, then Inconclusive") {
  const Verdict h = Verdict::make(Truth::Holds, "h"), f = Verdict::make(Truth::Fails, "f"),
                i = Verdict::make(Truth::Inconclusive, "i");
  CHECK(combine_all({h, h}).status == Truth::Holds);
  CHECK(combine_all({h, i}).status == Truth::Inconclusive);
  CHECK(combine_all({i, f, h}).status == Truth::Fails);
  CHECK_THROWS_AS((void)combine_all({}), Error);
}
