#pragma once

#include <string>
#include <vector>

#include "feller/verdict.hpp"
#include "feller/warping.hpp"

namespace feller {

/// A named model with the classifications it is known to have in closed form.
struct CorpusEntry {
  std::string name;
  std::string formula;  // human-readable description of g
  ModelManifold model;
  Truth parabolic;
  Truth stochastically_complete;
  Truth feller;
  Truth volume_finite;
};

/// Twelve models covering every branch of the Feller criterion: powers, sinh,
/// cosh, exp(+-r^beta) splices, a fast-decay finite-volume model and a cylinder.
[[nodiscard]] std::vector<CorpusEntry> standard_corpus();

/// The finite-volume non-Feller model: g = r near 0, exp(-alpha r^beta) for r >= r_b.
[[nodiscard]] ModelManifold versus_model(double alpha = 1.0, double beta = 3.0, int m = 2, double r_a = 1.0,
                                         double r_b = 10.0);

}  // namespace feller
