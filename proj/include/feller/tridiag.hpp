#pragma once

#include <cstddef>
#include <vector>

namespace feller {

/// Tridiagonal system: sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i].
/// sub[0] and sup[n-1] are ignored.
struct Tridiagonal {
  std::vector<double> sub, diag, sup;

  explicit Tridiagonal(std::size_t n = 0) : sub(n, 0.0), diag(n, 0.0), sup(n, 0.0) {}
  [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }
};

/// Thomas algorithm, no pivoting; intended for diagonally dominant systems.
[[nodiscard]] std::vector<double> solve_tridiagonal(const Tridiagonal& A, const std::vector<double>& rhs);

/// LU factors of a tridiagonal matrix, reused across many right-hand sides.
class TridiagonalFactor {
 public:
  explicit TridiagonalFactor(const Tridiagonal& A);
  void solve_in_place(std::vector<double>& x) const;

 private:
  std::vector<double> sub_, inv_pivot_, sup_scaled_;
};

}  // namespace feller
