#include "feller/fv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "feller/error.hpp"
#include "feller/quadrature.hpp"

namespace feller {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kRelTol = 1e-6;  // midpoint defect of the interpolant, relative to the rise
constexpr int kMaxDepth = 40;

double safe_log_w(const ModelManifold& M, double r) {
  try {
    const double l = M.log_w(r);
    if (!std::isfinite(l)) throw Error(ErrorCode::SingularCoefficient, "");
    return l;
  } catch (const Error& e) {
    throw Error(ErrorCode::SingularCoefficient, "g^{m-1} not usable at r = " + std::to_string(r) + " " + e.what());
  }
}

// log((e^x - 1) / x)
double log_e1(double x) {
  if (std::fabs(x) < 1e-4) return x / 2 + x * x / 24;
  if (x > 0) return x + std::log(-std::expm1(-x)) - std::log(x);
  return std::log(std::expm1(x) / x);
}

// log((e^x - 1 - x) / x^2)
double log_e2(double x) {
  if (std::fabs(x) < 1e-2) {
    return std::log(0.5 + x * (1.0 / 6 + x * (1.0 / 24 + x * (1.0 / 120 + x / 720))));
  }
  if (x > 30) return x + std::log1p(-(1 + x) * std::exp(-x)) - 2 * std::log(x);
  return std::log(std::expm1(x) - x) - 2 * std::log(std::fabs(x));
}

struct Piece {
  double h, l0, d;  // length, log w at the left end, rise of log w
};

void refine(const ModelManifold& M, double a, double b, double la, double lb, int depth, std::vector<Piece>& out) {
  const double m = 0.5 * (a + b);
  const double lm = safe_log_w(M, m);
  const double defect = std::fabs(lm - 0.5 * (la + lb));
  const double noise = 64 * std::numeric_limits<double>::epsilon() * std::max({1.0, std::fabs(la), std::fabs(lb)});
  if (depth >= kMaxDepth || defect <= std::max(kRelTol * std::max(1.0, std::fabs(lb - la)), noise)) {
    out.push_back({m - a, la, lm - la});
    out.push_back({b - m, lm, lb - lm});
    return;
  }
  refine(M, a, m, la, lm, depth + 1, out);
  refine(M, m, b, lm, lb, depth + 1, out);
}

}  // namespace

FvCell fv_cell(const ModelManifold& M, double a, double b) {
  if (!(b > a && a > 0.0)) throw Error(ErrorCode::Precondition, "fv_cell needs 0 < a < b");
  std::vector<Piece> pieces;
  refine(M, a, b, safe_log_w(M, a), safe_log_w(M, b), 0, pieces);
  const std::size_t K = pieces.size();

  // Per piece: int 1/w, int w, and the two nested integrals of w against the
  // resistance accumulated inside the piece.
  std::vector<double> inv(K), vol(K), nest_r(K), nest_l(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto& p = pieces[k];
    const double lh = std::log(p.h);
    inv[k] = -p.l0 + lh + log_e1(-p.d);
    vol[k] = p.l0 + lh + log_e1(p.d);
    nest_r[k] = 2 * lh + log_e2(p.d);
    nest_l[k] = 2 * lh + log_e2(-p.d);
  }
  std::vector<double> from_a(K + 1, kNegInf), to_b(K + 1, kNegInf);
  for (std::size_t k = 0; k < K; ++k) from_a[k + 1] = log_add(from_a[k], inv[k]);
  for (std::size_t k = K; k-- > 0;) to_b[k] = log_add(to_b[k + 1], inv[k]);
  const double log_s = from_a[K];

  double right = kNegInf, left = kNegInf;
  for (std::size_t k = 0; k < K; ++k) {
    right = log_add(right, log_add(from_a[k] + vol[k], nest_r[k]));
    left = log_add(left, log_add(to_b[k + 1] + vol[k], nest_l[k]));
  }
  return {-log_s, left - log_s, right - log_s};
}

FvCell fv_pole_cell(const ModelManifold& M, double b) {
  const double mid = 0.5 * b;
  auto w = [&M](double r) { return r == 0.0 ? kNegInf : safe_log_w(M, r); };
  const double left = log_integrate(w, 0.0, mid, 1e-12, 64).log_value;
  const double right = log_integrate(w, mid, b, 1e-12, 64).log_value;
  return {w(mid) - std::log(b), left, right};
}

}  // namespace feller
