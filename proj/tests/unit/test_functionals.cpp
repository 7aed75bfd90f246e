#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "thinfilm/errors.hpp"
#include "thinfilm/functionals.hpp"

using namespace thinfilm;

namespace {

constexpr double kPi = std::numbers::pi;

Field grid(int nx, double a, const std::function<double(double)>& f) {
  const double dx = 2.0 * a / nx;
  std::vector<double> v(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) v[static_cast<std::size_t>(i)] = f(-a + i * dx);
  return Field(std::move(v), dx, -a);
}

ProblemParams params(double n, double m, double a0, double a1, double a, int nx) {
  ProblemParams p;
  p.n = Exponent(*Rational::from_double(n));
  p.m = Exponent(*Rational::from_double(m));
  p.a0 = a0;
  p.a1 = a1;
  p.a = a;
  p.nx = nx;
  return p;
}

// composite Simpson on [lo, hi] with an even number of panels
double simpson(const std::function<double(double)>& f, double lo, double hi, int panels) {
  const double h = (hi - lo) / panels;
  double s = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

double second_difference(const std::function<double(double)>& g, double z, double h) {
  return (g(z + h) - 2.0 * g(z) + g(z - h)) / (h * h);
}

}  // namespace

TEST_CASE("mobility") {
  CHECK(mobility(0.0, 1.0, 0.1, 0.01) == doctest::Approx(0.01).epsilon(1e-15));
  for (double eps : {0.0, 0.1, 3.0}) CHECK(mobility(1.0, 2.0, eps, 0.0) == doctest::Approx(1.0 / (1.0 + eps)));
  // converges to z^n from below as eps decreases
  for (double z : {0.3, 1.0, 4.0}) {
    double prev = 0.0;
    for (double eps : {1.0, 0.1, 1e-2, 1e-4, 1e-8}) {
      const double f = mobility(z, 1.5, eps, 0.0);
      CHECK(f > prev);
      CHECK(f < std::pow(z, 1.5));
      prev = f;
    }
    CHECK(prev == doctest::Approx(std::pow(z, 1.5)).epsilon(1e-6));
  }
  // derivative matches a centred difference
  for (double z : {0.2, 1.0, 3.0}) {
    const double h = 1e-6 * z;
    const double fd = (mobility(z + h, 2.5, 0.1, 0.0) - mobility(z - h, 2.5, 0.1, 0.0)) / (2 * h);
    CHECK(mobility_derivative(z, 2.5, 0.1) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("face mobility") {
  const double eps = 1e-3;
  SUBCASE("equal nodes give the nodal mobility") {
    for (double n : {0.5, 1.0, 2.0, 3.0}) {
      for (double u : {1e-3, 0.5, 2.0}) {
        CHECK(face_mobility(u, u, n, eps, 0.0).value == doctest::Approx(mobility(u, n, eps, 0.0)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("vanishes as one node tends to zero") {
    for (double n : {1.0, 2.0, 3.0}) {
      double prev = face_mobility(1e-2, 1.0, n, eps, 0.0).value;
      for (double u0 : {1e-4, 1e-6, 1e-8}) {
        const double v = face_mobility(u0, 1.0, n, eps, 0.0).value;
        CHECK(v < prev);
        prev = v;
      }
      CHECK(prev < 1e-3);
    }
  }
  SUBCASE("bounded by the nodal mobilities and symmetric") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lu(-8.0, 1.0), un(0.3, 3.0);
    for (int k = 0; k < 200; ++k) {
      const double u0 = std::pow(10.0, lu(rng)), u1 = std::pow(10.0, lu(rng)), n = un(rng);
      const double f0 = mobility(u0, n, eps, 0.0), f1 = mobility(u1, n, eps, 0.0);
      const auto fm = face_mobility(u0, u1, n, eps, 0.0);
      CHECK(fm.value >= std::min(f0, f1) * (1 - 1e-12));
      CHECK(fm.value <= std::max(f0, f1) * (1 + 1e-12));
      CHECK(face_mobility(u1, u0, n, eps, 0.0).value == doctest::Approx(fm.value).epsilon(1e-12));
    }
  }
  SUBCASE("derivatives match finite differences") {
    for (double n : {1.0, 1.7, 3.0}) {
      for (auto [u0, u1] : {std::pair{0.3, 1.2}, std::pair{0.5, 0.5001}, std::pair{2.0, 0.05}}) {
        const auto fm = face_mobility(u0, u1, n, eps, 0.0);
        const double h0 = 1e-6 * u0, h1 = 1e-6 * u1;
        const double d0 = (face_mobility(u0 + h0, u1, n, eps, 0.0).value -
                           face_mobility(u0 - h0, u1, n, eps, 0.0).value) / (2 * h0);
        const double d1 = (face_mobility(u0, u1 + h1, n, eps, 0.0).value -
                           face_mobility(u0, u1 - h1, n, eps, 0.0).value) / (2 * h1);
        CHECK(fm.d0 == doctest::Approx(d0).epsilon(1e-3).scale(1e-8));
        CHECK(fm.d1 == doctest::Approx(d1).epsilon(1e-3).scale(1e-8));
      }
    }
  }
  SUBCASE("positive delta falls back to the arithmetic mean") {
    const auto fm = face_mobility(0.2, 1.0, 1.0, eps, 0.05);
    CHECK(fm.value == doctest::Approx(0.5 * (mobility(0.2, 1.0, eps, 0.05) + mobility(1.0, 1.0, eps, 0.05))));
  }
  CHECK_THROWS_AS(face_mobility(0.0, 1.0, 1.0, eps, 0.0), Error);
}

TEST_CASE("pressure coupling") {
  CHECK(pressure_coupling(1.0, 1.0, 3.0, 0.2) == doctest::Approx(1.0 / 1.2));
  CHECK(pressure_coupling(1e8, 1.0, 3.0, 0.2) == doctest::Approx(5.0).epsilon(1e-12));
  for (double z : {0.1, 1.0, 9.0}) CHECK(pressure_coupling(z, 2.0, 2.0, 0.3) == doctest::Approx(1.0 / 1.3));
  for (double z : {0.3, 2.0}) {
    const double h = 1e-6 * z;
    const double fd = (pressure_coupling(z + h, 1.0, 2.5, 0.1) - pressure_coupling(z - h, 1.0, 2.5, 0.1)) / (2 * h);
    CHECK(pressure_coupling_derivative(z, 1.0, 2.5, 0.1) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("entropy examples") {
  const auto one = grid(64, 0.5, [](double) { return 1.0; });
  CHECK(std::abs(entropy_value(one, make_entropy_spec(1.0))) < 1e-15);
  const auto four = grid(64, 0.5, [](double) { return 4.0; });
  CHECK(entropy_value(four, make_entropy_spec(0.5)) == doctest::Approx(32.0 / 3.0).epsilon(1e-13));
  CHECK_THROWS_AS(entropy_density(-1.0, make_entropy_spec(1.0)), Error);
}

TEST_CASE("entropy density has the stated second derivative") {
  struct Case {
    double n, alpha, eps;
  };
  // covers log, power, offset (1 < n - alpha < 2) and eps branches
  const Case cases[] = {{1.0, 0.0, 0.0},  {2.0, 0.0, 0.0}, {0.5, 0.0, 0.0}, {1.5, 0.0, 0.0},
                        {1.0, 0.5, 0.0},  {1.5, -0.3, 0.0}, {3.0, 0.0, 1e-2}, {1.5, 0.0, 1e-2},
                        {2.5, 0.4, 1e-3}, {1.0, 0.0, 1e-1}};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lz(-1.0, 1.0);
  for (const auto& c : cases) {
    const auto spec = make_entropy_spec(c.n, c.alpha, c.eps);
    const auto g = [&](double z) { return entropy_density(z, spec); };
    for (int k = 0; k < 200; ++k) {
      const double z = std::pow(10.0, lz(rng));
      const double fd = second_difference(g, z, 1e-4 * z);
      CHECK(fd == doctest::Approx(entropy_density_second_derivative(z, spec)).epsilon(1e-6));
    }
  }
}

TEST_CASE("entropy offset is the smallest shift keeping G nonnegative") {
  for (auto [n, alpha] : {std::pair{1.5, 0.0}, std::pair{1.8, 0.5}, std::pair{1.5, -0.3}}) {
    const auto spec = make_entropy_spec(n, alpha, 0.0);
    CHECK(spec.offset > 0.0);
    double lo = INFINITY;
    for (int i = 0; i <= 200000; ++i) lo = std::min(lo, entropy_density(std::pow(10.0, -6.0 + 12.0 * i / 200000.0), spec));
    CHECK(lo >= 0.0);
    // G' vanishes where z^(1-q) = q - 1
    const double q = n - alpha;
    const double zstar = std::pow(q - 1.0, 1.0 / (1.0 - q));
    CHECK(entropy_density(zstar, spec) <= 1e-12 * std::max(1.0, spec.offset));
  }
  CHECK(make_entropy_spec(1.0).offset == 0.0);
  CHECK(make_entropy_spec(0.5).offset == 0.0);
}

TEST_CASE("potentials") {
  CHECK(potential_D0(2.0, Exponent(1.0), Exponent(3.0)) == doctest::Approx(4.0 / 3.0));
  CHECK(potential_D0(1.0, Exponent(2.0), Exponent(1.0)) == 0.0);
  CHECK(potential_D0(1.0, Exponent(3.0), Exponent(1.0)) == 0.0);
  CHECK_THROWS_AS(potential_D0(0.0, Exponent(3.0), Exponent(1.0)), Error);
  for (auto [n, m] : {std::pair{1.0, 3.0}, std::pair{2.0, 1.0}, std::pair{3.0, 1.0}, std::pair{1.0, 1.5}}) {
    const auto d0 = [&](double z) { return potential_D0(z, Exponent(n), Exponent(m)); };
    const auto de = [&](double z) { return regularized_potential(z, n, m, 1e-2); };
    for (double z : {0.3, 1.0, 2.5}) {
      CHECK(second_difference(d0, z, 1e-4) == doctest::Approx(std::pow(z, m - n)).epsilon(1e-6));
      CHECK(second_difference(de, z, 1e-4) == doctest::Approx(pressure_coupling(z, n, m, 1e-2)).epsilon(1e-6));
    }
    CHECK(std::abs(de(1.0)) < 1e-15);
    CHECK(std::abs((de(1.0 + 1e-6) - de(1.0 - 1e-6)) / 2e-6) < 1e-8);
  }
}

TEST_CASE("energy") {
  const auto p = params(1, 3, 1, 1, kPi, 128);
  const auto c = grid(128, kPi, [](double) { return 1.5; });
  CHECK(energy(c, p) == doctest::Approx(-1.0 * 2 * kPi * std::pow(1.5, 4) / 12.0).epsilon(1e-13));
  const auto stable = params(1, 3, 1, 0, kPi, 128);
  const auto s = grid(128, kPi, [](double x) { return 1.0 + 0.5 * std::sin(x); });
  CHECK(energy(s, stable) > 0.0);
  CHECK(energy(s, stable) == doctest::Approx(0.5 * hx_sq(s)));
}

TEST_CASE("energy of the cosine bump converges to a fine-quadrature oracle at second order") {
  // oracle: Simpson on the closed-form integrand, independent of the grid code
  const double A = 1.0;
  const double oracle = simpson(
      [&](double x) {
        const double h = A * (1 + std::cos(x)), hx = -A * std::sin(x);
        return 0.5 * hx * hx - h * h * h * h / 12.0;
      },
      -kPi, kPi, 20000);
  CHECK(oracle == doctest::Approx(-11.0 * kPi / 48.0).epsilon(1e-12));
  double prev_err = 0.0;
  for (int nx : {64, 128, 256, 512}) {
    const auto p = params(1, 3, 1, 1, kPi, nx);
    const auto h = grid(nx, kPi, [&](double x) { return A * (1 + std::cos(x)); });
    const double err = std::abs(energy(h, p) - oracle);
    CHECK(err <= p.dx() * p.dx());
    if (prev_err > 0.0) CHECK(prev_err / err == doctest::Approx(4.0).epsilon(0.05));
    prev_err = err;
  }
}

TEST_CASE("quadrature of the entropy is at least second order") {
  const auto spec = make_entropy_spec(1.5);
  const auto f = [](double x) { return 1.0 + 0.6 * std::sin(x) * std::sin(x) + 0.2 * std::cos(3 * x); };
  const double ref = entropy_value(grid(4096, kPi, f), spec);
  const double e1 = std::abs(entropy_value(grid(16, kPi, f), spec) - ref);
  const double e2 = std::abs(entropy_value(grid(32, kPi, f), spec) - ref);
  CHECK(e1 / std::max(e2, 1e-300) >= 4.0);
}

TEST_CASE("hx_sq and h1 norm of a sine") {
  const int nx = 256;
  const auto h = grid(nx, kPi, [](double x) { return std::sin(x); });
  const double dx = 2 * kPi / nx;
  // face differences of sin give |2 sin(dx/2)/dx|^2 * pi exactly
  const double exact = kPi * std::pow(2 * std::sin(dx / 2) / dx, 2);
  CHECK(hx_sq(h) == doctest::Approx(exact).epsilon(1e-12));
  CHECK(h1_norm(h) == doctest::Approx(std::sqrt(kPi + exact)).epsilon(1e-12));
}

TEST_CASE("second moment entropy") {
  const auto zero = grid(128, 2.0, [](double) { return 0.0; });
  CHECK(second_moment_entropy(zero, 1.0) == 0.0);
  const auto h = grid(128, 2.0, [](double x) { return 1.0 + 0.5 * std::cos(kPi * x / 2); });
  double m2 = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) m2 += h.x(i) * h.x(i) * h[i];
  CHECK(second_moment_entropy(h, 1.0) == doctest::Approx(m2 * h.dx()).epsilon(1e-13));
  // narrow bump of unit mass at x = 1
  const double w = 0.02;
  auto bump = grid(4096, 2.0, [&](double x) {
    const double r = (x - 1.0) / w;
    return std::abs(r) < 1 ? (1 + std::cos(kPi * r)) / (2 * w) : 0.0;
  });
  CHECK(second_moment_entropy(bump, 1.0) == doctest::Approx(bump.mass()).epsilon(1e-3));
  CHECK_THROWS_AS(second_moment_entropy(h, 2.0), Error);
  try {
    second_moment_entropy(h, 2.5);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ExponentOutOfRange);
  }
}

TEST_CASE("moment_hxx vanishes on constants") {
  CHECK(moment_hxx(grid(64, 1.0, [](double) { return 3.0; })) == 0.0);
  CHECK(moment_hxx(grid(64, 1.0, [](double x) { return 2.0 + std::cos(kPi * x); })) > 0.0);
}

TEST_CASE("weighted history") {
  auto series = [](std::initializer_list<std::pair<double, double>> ts) {
    std::vector<FunctionalSample> v;
    for (auto [t, sup] : ts) {
      FunctionalSample s;
      s.t = t;
      s.sup = sup;
      v.push_back(s);
    }
    return v;
  };
  const auto p1 = params(1, 2, 2, 3, 1, 16);
  const auto flat = series({{0, 1}, {0.5, 1}, {1.25, 1}, {2, 1}});
  CHECK(weighted_history(flat, p1, HistoryMode::Btilde) == 0.0);
  CHECK(weighted_history(flat, p1, HistoryMode::B1) == doctest::Approx(9.0 / 2.0 * 2.0));
  CHECK(weighted_history(series({{0, 3}}), p1, HistoryMode::B1) == 0.0);
  CHECK(weighted_history(series({{0, 3}}), p1, HistoryMode::B2) == 0.0);
  CHECK_THROWS_AS(weighted_history(series({{0, 1}, {1, 1}, {0.5, 1}}), p1, HistoryMode::B1), Error);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  const auto p = params(1.5, 2.5, 1, 1, 1, 16);
  std::vector<FunctionalSample> v;
  double t = 0;
  for (int k = 0; k < 50; ++k) {
    FunctionalSample s;
    s.t = t;
    s.sup = u(rng);
    v.push_back(s);
    t += 0.1 * u(rng);
  }
  for (auto mode : {HistoryMode::B1, HistoryMode::B2, HistoryMode::Btilde}) {
    const auto acc = weighted_history_series(v, p, mode);
    for (std::size_t i = 1; i < acc.size(); ++i) CHECK(acc[i] >= acc[i - 1]);
  }
}
