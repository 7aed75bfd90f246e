#include "thinfilm/banded.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

// Non-cyclic band matrix with kl = ku = 2; pivoting widens the upper band to 4.
// Row r stores columns r-2 .. r+4.
class BandLU {
 public:
  explicit BandLU(std::size_t n) : n_(n), ab_(n * 7, 0.0), piv_(n, 0) {}

  double& operator()(std::size_t r, std::size_t c) { return ab_[r * 7 + (c + 2 - r)]; }

  void factor() {
    double scale = 0.0;
    for (double v : ab_) scale = std::max(scale, std::abs(v));
    const double tiny = scale * 1e-300;
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t last = std::min(n_ - 1, k + 2);
      std::size_t p = k;
      double best = std::abs((*this)(k, k));
      for (std::size_t r = k + 1; r <= last; ++r) {
        if (std::abs((*this)(r, k)) > best) {
          best = std::abs((*this)(r, k));
          p = r;
        }
      }
      if (!(best > tiny)) throw Error(Errc::LinearSolveFailure, "singular band block");
      piv_[k] = p;
      const std::size_t cend = std::min(n_ - 1, k + 4);
      if (p != k) {
        for (std::size_t c = k; c <= cend; ++c) std::swap((*this)(k, c), (*this)(p, c));
      }
      const double d = (*this)(k, k);
      for (std::size_t r = k + 1; r <= last; ++r) {
        const double l = (*this)(r, k) / d;
        (*this)(r, k) = l;
        if (l == 0.0) continue;
        for (std::size_t c = k + 1; c <= cend; ++c) (*this)(r, c) -= l * (*this)(k, c);
      }
    }
  }

  void solve_in_place(std::span<double> b) {
    for (std::size_t k = 0; k < n_; ++k) {
      if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
      const std::size_t last = std::min(n_ - 1, k + 2);
      for (std::size_t r = k + 1; r <= last; ++r) b[r] -= (*this)(r, k) * b[k];
    }
    for (std::size_t k = n_; k-- > 0;) {
      double s = b[k];
      const std::size_t cend = std::min(n_ - 1, k + 4);
      for (std::size_t c = k + 1; c <= cend; ++c) s -= (*this)(k, c) * b[c];
      b[k] = s / (*this)(k, k);
    }
  }

 private:
  std::size_t n_;
  std::vector<double> ab_;
  std::vector<std::size_t> piv_;
};

}  // namespace

CyclicPentadiagonal::CyclicPentadiagonal(std::size_t n) : n_(n), a_(n * 5, 0.0) {
  if (n < 8) throw Error(Errc::InvalidArgument, "cyclic pentadiagonal system needs at least 8 unknowns");
}

void CyclicPentadiagonal::clear() noexcept { std::fill(a_.begin(), a_.end(), 0.0); }

void CyclicPentadiagonal::multiply(std::span<const double> x, std::span<double> y) const {
  const auto N = static_cast<std::ptrdiff_t>(n_);
  for (std::ptrdiff_t i = 0; i < N; ++i) {
    double s = 0.0;
    for (int k = -2; k <= 2; ++k) {
      std::ptrdiff_t j = (i + k + N) % N;
      s += at(static_cast<std::size_t>(i), k) * x[static_cast<std::size_t>(j)];
    }
    y[static_cast<std::size_t>(i)] = s;
  }
}

std::vector<double> CyclicPentadiagonal::solve(std::span<const double> rhs) const {
  const std::size_t N = n_;
  const std::size_t n1 = N - 2;  // interior block; unknowns n1, n1+1 form the border
  BandLU lu(n1);
  std::vector<double> a12(n1 * 2, 0.0);               // column-major: a12[c*n1 + i]
  std::array<double, 2 * 8> a21_val{};                 // border row couplings
  std::array<std::size_t, 2 * 8> a21_col{};
  std::array<std::size_t, 2> a21_count{};
  std::array<double, 4> a22{};

  for (std::size_t i = 0; i < N; ++i) {
    for (int k = -2; k <= 2; ++k) {
      const double v = at(i, k);
      if (v == 0.0) continue;
      const std::size_t j = (i + N + static_cast<std::size_t>(k + 2) - 2) % N;
      if (i < n1) {
        if (j < n1) {
          lu(i, j) += v;
        } else {
          a12[(j - n1) * n1 + i] += v;
        }
      } else {
        const std::size_t br = i - n1;
        if (j < n1) {
          a21_val[br * 8 + a21_count[br]] = v;
          a21_col[br * 8 + a21_count[br]] = j;
          ++a21_count[br];
        } else {
          a22[br * 2 + (j - n1)] += v;
        }
      }
    }
  }

  lu.factor();
  std::vector<double> y(rhs.begin(), rhs.begin() + static_cast<std::ptrdiff_t>(n1));
  lu.solve_in_place(y);
  lu.solve_in_place(std::span<double>(a12.data(), n1));
  lu.solve_in_place(std::span<double>(a12.data() + n1, n1));

  // S = A22 - A21 Z, r = b2 - A21 y
  std::array<double, 4> S = a22;
  std::array<double, 2> r{rhs[n1], rhs[n1 + 1]};
  for (std::size_t br = 0; br < 2; ++br) {
    for (std::size_t e = 0; e < a21_count[br]; ++e) {
      const double v = a21_val[br * 8 + e];
      const std::size_t j = a21_col[br * 8 + e];
      S[br * 2 + 0] -= v * a12[j];
      S[br * 2 + 1] -= v * a12[n1 + j];
      r[br] -= v * y[j];
    }
  }
  const double det = S[0] * S[3] - S[1] * S[2];
  const double snorm = std::max({std::abs(S[0]), std::abs(S[1]), std::abs(S[2]), std::abs(S[3])});
  if (!(std::abs(det) > 1e-14 * snorm * snorm) || !std::isfinite(det)) {
    throw Error(Errc::LinearSolveFailure, "singular border block");
  }
  const double x0 = (S[3] * r[0] - S[1] * r[1]) / det;
  const double x1 = (S[0] * r[1] - S[2] * r[0]) / det;

  std::vector<double> x(N);
  for (std::size_t i = 0; i < n1; ++i) x[i] = y[i] - a12[i] * x0 - a12[n1 + i] * x1;
  x[n1] = x0;
  x[n1 + 1] = x1;
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(Errc::LinearSolveFailure, "non-finite solution");
  }
  return x;
}

}  // namespace thinfilm
