#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace thinfilm {

/// Square matrix whose row i couples u_{i-2..i+2} with indices taken mod size.
class CyclicPentadiagonal {
 public:
  explicit CyclicPentadiagonal(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  /// Coefficient of u_{i+k} in row i, k in [-2, 2].
  double& at(std::size_t i, int k) noexcept { return a_[i * 5 + static_cast<std::size_t>(k + 2)]; }
  double at(std::size_t i, int k) const noexcept { return a_[i * 5 + static_cast<std::size_t>(k + 2)]; }
  void clear() noexcept;

  void multiply(std::span<const double> x, std::span<double> y) const;

  /// Banded LU with partial pivoting on the leading block, Schur complement on
  /// the last two unknowns. Throws Error(LinearSolveFailure) when singular.
  std::vector<double> solve(std::span<const double> rhs) const;

 private:
  std::size_t n_;
  std::vector<double> a_;
};

}  // namespace thinfilm
