#pragma once

#include <optional>
#include <string>
#include <vector>

#include "feller/classifier.hpp"

namespace feller {

/// R x_f S^{m-1} with f > 0 on the whole line. The ends at +inf and -inf
/// become the models g_1(r) = f(r) and g_2(r) = f(-r) beyond a blend window
/// in which g_i is joined to r. Optional tail formulas in r replace f(r) and
/// f(-r) respectively.
struct WarpedLine {
  Expr f;
  int dim = 2;
  std::string formula;
  std::optional<Expr> tail_pos;
  std::optional<Expr> tail_neg;
  double blend_start = 0.5;
  double blend_end = 1.5;

  static WarpedLine parse(std::string_view formula, int m, const ParamTable& params = {});
};

struct EndModels {
  ModelManifold end1;  // the end at +inf
  ModelManifold end2;  // the end at -inf
};

/// Throws NonPositive if f is not positive on the sampled line.
[[nodiscard]] EndModels split_ends(const WarpedLine& W);

struct WarpedLineReport {
  ClassificationReport end1;
  ClassificationReport end2;
  Verdict feller;
  int failing_end = 0;  // 1 or 2 when an end is not Feller, else 0
};

[[nodiscard]] WarpedLineReport classify_warped_line(const WarpedLine& W, const ClassifierOptions& opts = {});

/// All-of: Fails dominates Inconclusive, which dominates Holds.
[[nodiscard]] Verdict combine_end_verdicts(const std::vector<Verdict>& verdicts);

}  // namespace feller
