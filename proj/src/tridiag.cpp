#include "feller/tridiag.hpp"

#include "feller/error.hpp"

namespace feller {

TridiagonalFactor::TridiagonalFactor(const Tridiagonal& A)
    : sub_(A.sub), inv_pivot_(A.size()), sup_scaled_(A.size()) {
  const std::size_t n = A.size();
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pivot = A.diag[i] - (i > 0 ? A.sub[i] * prev : 0.0);
    if (pivot == 0.0) throw Error(ErrorCode::SingularCoefficient, "zero pivot in tridiagonal solve");
    inv_pivot_[i] = 1.0 / pivot;
    prev = (i + 1 < n) ? A.sup[i] * inv_pivot_[i] : 0.0;
    sup_scaled_[i] = prev;
  }
}

void TridiagonalFactor::solve_in_place(std::vector<double>& x) const {
  const std::size_t n = inv_pivot_.size();
  if (n == 0) return;
  x[0] *= inv_pivot_[0];
  for (std::size_t i = 1; i < n; ++i) x[i] = (x[i] - sub_[i] * x[i - 1]) * inv_pivot_[i];
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= sup_scaled_[i] * x[i + 1];
}

std::vector<double> solve_tridiagonal(const Tridiagonal& A, const std::vector<double>& rhs) {
  std::vector<double> x = rhs;
  TridiagonalFactor(A).solve_in_place(x);
  return x;
}

}  // namespace feller
