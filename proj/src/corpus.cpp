#include "feller/corpus.hpp"

#include <sstream>

namespace feller {

namespace {

ModelManifold spliced(int m, const std::string& tail, double r_a, double r_b) {
  return make_model(m, WarpingFunction::spliced("r", tail, r_a, r_b));
}

}  // namespace

ModelManifold versus_model(double alpha, double beta, int m, double r_a, double r_b) {
  return make_model(m, WarpingFunction::spliced("r", "exp(-alpha*r^beta)", r_a, r_b, {{"alpha", alpha}, {"beta", beta}}));
}

std::vector<CorpusEntry> standard_corpus() {
  using T = Truth;
  std::vector<CorpusEntry> c;
  auto add = [&c](std::string name, std::string formula, ModelManifold M, T par, T sc, T fel, T vol) {
    c.push_back({std::move(name), std::move(formula), std::move(M), par, sc, fel, vol});
  };
  add("flat_m2", "r", make_model(2, WarpingFunction::parse("r")), T::Holds, T::Holds, T::Holds, T::Fails);
  add("flat_m3", "r", make_model(3, WarpingFunction::parse("r")), T::Fails, T::Holds, T::Holds, T::Fails);
  add("square_tail_m2", "r -> r^2 on [1,2]", spliced(2, "r^2", 1, 2), T::Fails, T::Holds, T::Holds, T::Fails);
  add("sinh_m2", "sinh(r)", make_model(2, WarpingFunction::parse("sinh(r)")), T::Fails, T::Holds, T::Holds, T::Fails);
  add("sinh_m3", "sinh(r)", make_model(3, WarpingFunction::parse("sinh(r)")), T::Fails, T::Holds, T::Holds, T::Fails);
  add("cosh_m3", "r -> cosh(r) on [0.5,1.5]", spliced(3, "cosh(r)", 0.5, 1.5), T::Fails, T::Holds, T::Holds,
      T::Fails);
  add("versus_m2", "r -> exp(-r^3) on [1,10]", versus_model(), T::Holds, T::Holds, T::Fails, T::Holds);
  add("exp_cubic_m2", "r -> exp(r^3) on [1,2]", spliced(2, "exp(r^3)", 1, 2), T::Fails, T::Fails, T::Holds,
      T::Fails);
  add("gauss_m2", "r -> exp(-r^2) on [1,2]", spliced(2, "exp(-r^2)", 1, 2), T::Holds, T::Holds, T::Holds,
      T::Holds);
  add("quartic_m3", "r -> exp(-r^4) on [1,2]", spliced(3, "exp(-r^4)", 1, 2), T::Holds, T::Holds, T::Fails,
      T::Holds);
  add("cylinder_m2", "r -> 1 on [1,2]", spliced(2, "1", 1, 2), T::Holds, T::Holds, T::Holds, T::Fails);
  add("exp_decay_m2", "r -> exp(-r) on [1,2]", spliced(2, "exp(-r)", 1, 2), T::Holds, T::Holds, T::Holds,
      T::Holds);
  return c;
}

}  // namespace feller
