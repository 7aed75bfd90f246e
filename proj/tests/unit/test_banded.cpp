#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "thinfilm/banded.hpp"
#include "thinfilm/errors.hpp"

using namespace thinfilm;

namespace {

std::vector<std::vector<double>> dense(const CyclicPentadiagonal& A) {
  const std::size_t n = A.size();
  std::vector<std::vector<double>> D(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = -2; k <= 2; ++k) {
      const std::size_t j = (i + n + static_cast<std::size_t>(k + static_cast<int>(n))) % n;
      D[i][j] += A.at(i, k);
    }
  }
  return D;
}

// Gaussian elimination with full row pivoting on the dense matrix
std::vector<double> dense_solve(std::vector<std::vector<double>> D, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(D[r][c]) > std::abs(D[piv][c])) piv = r;
    }
    std::swap(D[c], D[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = D[r][c] / D[c][c];
      for (std::size_t k = c; k < n; ++k) D[r][k] -= f * D[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= D[i][k] * x[k];
    x[i] = s / D[i][i];
  }
  return x;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("solve agrees with dense elimination") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {8u, 9u, 16u, 33u, 64u}) {
    for (int trial = 0; trial < 20; ++trial) {
      CyclicPentadiagonal A(n);
      // half the trials are not diagonally dominant, which exercises pivoting
      const double diag = trial % 2 ? 0.0 : 5.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (int k = -2; k <= 2; ++k) A.at(i, k) = u(rng);
        A.at(i, 0) += diag;
      }
      std::vector<double> b(n);
      for (double& x : b) x = u(rng);
      const auto want = dense_solve(dense(A), b);
      const auto got = A.solve(b);
      std::vector<double> diff(n);
      for (std::size_t i = 0; i < n; ++i) diff[i] = got[i] - want[i];
      CHECK(max_abs(diff) <= 1e-9 * std::max(1.0, max_abs(want)));

      std::vector<double> Ax(n);
      A.multiply(got, Ax);
      for (std::size_t i = 0; i < n; ++i) diff[i] = Ax[i] - b[i];
      CHECK(max_abs(diff) <= 1e-10 * std::max(1.0, max_abs(got)));
    }
  }
}

TEST_CASE("multiply wraps periodically") {
  CyclicPentadiagonal A(8);
  A.at(0, -2) = 1.0;
  A.at(0, 2) = 2.0;
  A.at(7, 1) = 3.0;
  std::vector<double> x = {1, 2, 3, 4, 5, 6, 7, 8}, y(8);
  A.multiply(x, y);
  CHECK(y[0] == 1.0 * 7 + 2.0 * 3);
  CHECK(y[7] == 3.0 * 1);
}

TEST_CASE("singular systems are reported") {
  // periodic fourth difference annihilates constants
  CyclicPentadiagonal A(16);
  for (std::size_t i = 0; i < 16; ++i) {
    A.at(i, -2) = 1;
    A.at(i, -1) = -4;
    A.at(i, 0) = 6;
    A.at(i, 1) = -4;
    A.at(i, 2) = 1;
  }
  std::vector<double> b(16, 1.0);
  CHECK_THROWS_AS(A.solve(b), Error);
  CyclicPentadiagonal Z(8);
  try {
    Z.solve(std::vector<double>(8, 1.0));
    FAIL("expected LinearSolveFailure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::LinearSolveFailure);
  }
}

TEST_CASE("too small a system is rejected") { CHECK_THROWS(CyclicPentadiagonal(4)); }
