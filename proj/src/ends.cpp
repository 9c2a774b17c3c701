#include "feller/ends.hpp"

#include <cmath>

#include "feller/error.hpp"

namespace feller {

namespace {

void check_positive(const WarpedLine& W) {
  for (int k = -400; k <= 400; ++k) {
    const double t = std::copysign(std::pow(64.0, std::fabs(k) / 400.0) - 1.0, k);
    const LogDual v = W.f.eval_log(t);
    if (v.sv <= 0)
      throw Error(ErrorCode::NonPositive, "f(" + std::to_string(t) + ") is not positive");
  }
}

ModelManifold end_model(const Expr& tail, const WarpedLine& W) {
  return make_model(W.dim, WarpingFunction(WarpingSource::from_formula("r"), WarpingSource::from_expr(tail),
                                           W.blend_start, W.blend_end));
}

}  // namespace

WarpedLine WarpedLine::parse(std::string_view formula, int m, const ParamTable& params) {
  if (m < 2) throw Error(ErrorCode::ValidationError, "dimension must be at least 2");
  WarpedLine W;
  W.f = Expr::parse(formula, "t", params);
  W.dim = m;
  W.formula = std::string(formula);
  return W;
}

EndModels split_ends(const WarpedLine& W) {
  if (!(W.blend_end > W.blend_start && W.blend_start > 0.0))
    throw Error(ErrorCode::ValidationError, "blend window must satisfy 0 < start < end");
  check_positive(W);
  const Expr pos = W.tail_pos ? *W.tail_pos : W.f;
  const Expr neg = W.tail_neg ? *W.tail_neg : W.f.compose(-Expr::variable());
  return {end_model(pos, W), end_model(neg, W)};
}

WarpedLineReport classify_warped_line(const WarpedLine& W, const ClassifierOptions& opts) {
  const EndModels ends = split_ends(W);
  WarpedLineReport rep{classify(ends.end1, opts), classify(ends.end2, opts), {}, 0};
  rep.feller = combine_end_verdicts({rep.end1.feller, rep.end2.feller});
  if (rep.end1.feller.fails()) rep.failing_end = 1;
  else if (rep.end2.feller.fails()) rep.failing_end = 2;
  rep.feller.basis += std::string(" (end1 ") + to_string(rep.end1.feller.status) + ", end2 " +
                      to_string(rep.end2.feller.status) + ")";
  return rep;
}

Verdict combine_end_verdicts(const std::vector<Verdict>& verdicts) {
  Verdict v = combine_all(verdicts);
  v.basis = "ends: " + v.basis;
  return v;
}

}  // namespace feller
