#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "thinfilm/analysis.hpp"
#include "thinfilm/errors.hpp"
#include "thinfilm/functionals.hpp"
#include "thinfilm/interpolation.hpp"

using namespace thinfilm;

namespace {

constexpr double kPi = std::numbers::pi;

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

Field grid(int nx, double a, const std::function<double(double)>& f) {
  const double dx = 2.0 * a / nx;
  std::vector<double> v(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) v[static_cast<std::size_t>(i)] = f(-a + i * dx);
  return Field(std::move(v), dx, -a);
}

double lp_power(const Field& h, double p) {
  double s = 0.0;
  for (double v : h.values()) s += std::pow(std::abs(v), p);
  return s * h.dx();
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("interpolation bound") {
  CHECK(interpolation_bound(1.0, 2.5, 7.0, 3.0, 0.1) == doctest::Approx(2.5).epsilon(1e-15));
  // constants: the k2 term alone is ||C||_p^p in the limit eps_interp -> 1
  const auto c = grid(64, 1.0, [](double) { return 1.7; });
  const double exact = lp_power(c, 3.0);
  double prev = INFINITY;
  for (double e : {0.1, 0.5, 0.9, 0.99, 0.9999, 1.0 - 1e-10}) {
    const double b = interpolation_bound(3.0, c.mass(), hx_sq(c), 2.0, e);
    CHECK(b >= exact * (1 - 1e-12));
    CHECK(b <= prev);
    prev = b;
  }
  CHECK(prev == doctest::Approx(exact).epsilon(1e-3));

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    double coef[4];
    for (double& x : coef) x = u(rng);
    auto h = grid(256, kPi, [&](double x) {
      return std::abs(1.0 + coef[0] * std::sin(x) + coef[1] * std::cos(2 * x) + coef[2] * std::sin(5 * x) +
                      0.3 * coef[3] * std::cos(9 * x));
    });
    const double M = h.mass();
    for (double& v : h.values()) v /= M;  // unit mass
    CHECK(interpolation_bound(4.0, 1.0, hx_sq(h), 2 * kPi, 0.1) >= lp_power(h, 4.0));
  }
}

TEST_CASE("basic constants") {
  const auto b = basic_constants(3.0, 2.0);
  CHECK(b.b1 == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(b.b4 == doctest::Approx(4.0 * b.b3).epsilon(1e-14));
  CHECK(b.b5 == doctest::Approx(1.0).epsilon(1e-14));
  const auto half = basic_constants(0.5, 2.0);
  CHECK(half.B4() == half.b4_tilde);
  CHECK(half.B5() == half.b5_tilde);
}

TEST_CASE("constants chain") {
  SolverConfig cfg;
  auto k = constants_chain(params(1, 3, 1, 1, kPi, 64), cfg, 1.0, 0.5, 0.3);
  CHECK(k.gamma1 == 5.0);
  CHECK(k.p_exponent == 10.0);
  k = constants_chain(params(1, 1, 2, 4, kPi, 64), cfg, 1.0, 0.5, 0.3);
  CHECK(k.c2 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(k.gamma1 == 3.0);

  const auto z = constants_chain(params(1, 3, 1, 0, kPi, 64), cfg, 1.0, 0.5, 3.0);
  CHECK(z.c2 == 0.0);
  CHECK(z.c3 == 0.0);
  CHECK(z.c4 == 0.0);
  CHECK(z.K == doctest::Approx(std::pow(2.0, 1.0 / (z.gamma1 - 1.0)) * 3.0));
  const auto z1 = constants_chain(params(1, 3, 1, 0, kPi, 64), cfg, 1.0, 0.5, 0.2);
  CHECK(z1.K == doctest::Approx(std::pow(2.0, 1.0 / (z1.gamma1 - 1.0))));
}

TEST_CASE("existence time estimate") {
  SolverConfig cfg;
  const auto k = constants_chain(params(1, 1, 1, 1, kPi, 64), cfg, 1.0, 0.1, 0.1);
  REQUIRE(k.c11 > 0.0);
  const double cap = 9.0 / (20.0 * k.c11 * (k.gamma1 - 1.0));
  CHECK(tloc_estimate(k, 0.2, 0.0) == doctest::Approx(cap));
  CHECK(tloc_estimate(k, 0.0, 0.0) == doctest::Approx(cap));
  // with the entropy term off, doubling the gradient scales by 2^-(gamma1 - 1)
  CHECK(tloc_estimate(k, 8.0, 0.0) / tloc_estimate(k, 4.0, 0.0) ==
        doctest::Approx(std::pow(2.0, -(k.gamma1 - 1.0))));
  double prev = INFINITY;
  for (double hx = 0.0; hx < 50.0; hx += 0.7) {
    const double t = tloc_estimate(k, hx, 0.3);
    CHECK(t <= prev);
    prev = t;
  }
}

TEST_CASE("Bihari bound") {
  const auto b = bihari_bound(2.0, 1.0, 3.0);
  CHECK(b(0.1) == doctest::Approx(4.47214).epsilon(1e-6));
  CHECK(b.blow_time == doctest::Approx(0.125));
  CHECK(std::isinf(b(0.2)));
  const auto l = bihari_bound(0.25, 2.0, 2.0);
  const double t0 = 0.375;
  CHECK(l(t0 - 1e-12) == doctest::Approx(l(t0 + 1e-12)).epsilon(1e-9));
  CHECK(l(0.1) == doctest::Approx(0.45));
  CHECK(l.blow_time == doctest::Approx(t0 + 0.5));
  CHECK_THROWS_AS(bihari_bound(1.0, 0.0, 2.0), Error);
  CHECK_THROWS_AS(bihari_bound(1.0, 1.0, 1.0), Error);
}

TEST_CASE("weighted bounds on synthetic ledgers") {
  RunLedger l;
  for (int i = 0; i < 5; ++i) {
    FunctionalSample s;
    s.t = 0.1 * i;
    s.hx_sq = 0.0;
    s.entropy = 0.7;
    s.sup = 2.0;
    l.push(s);
  }
  auto r = check_exp_weighted_bounds(l, params(1, 1, 1, 1, 1, 16));
  CHECK(r.ok);
  CHECK(r.rows.size() == 5);

  // a1 = 0: weights vanish, so any growth of int h_x^2 beyond the slack fails
  RunLedger g;
  for (int i = 0; i < 3; ++i) {
    FunctionalSample s;
    s.t = i;
    s.hx_sq = 1.0 + 0.02 * i;
    s.entropy = 1.0;
    s.sup = 1.0;
    g.push(s);
  }
  const auto stable = params(1, 1, 1, 0, 1, 16);
  CHECK(check_exp_weighted_bounds(g, stable, 0.05).ok);
  CHECK_FALSE(check_exp_weighted_bounds(g, stable, 0.01).ok);
}

TEST_CASE("moment certificate") {
  const auto p = params(1, 3, 1, 1, 10, 100);
  auto ledger = [&](double E0, double slope) {
    RunLedger l;
    for (int i = 0; i <= 10; ++i) {
      FunctionalSample s;
      s.t = 0.1 * i;
      s.energy = E0;
      s.moment = 5.0 + slope * s.t;
      s.x_left = -2.0;
      s.x_right = 2.0;
      s.sup = 1.0;
      l.push(s);
    }
    return l;
  };
  auto c = moment_certificate(ledger(-1.0, -6.0), p);
  CHECK(c.k1 == 6.0);
  CHECK(c.k2 == 0.0);
  REQUIRE(c.T_ub);
  CHECK(*c.T_ub == doctest::Approx(5.0 / 6.0));
  CHECK(c.margin == doctest::Approx(0.0).scale(1.0));
  CHECK(c.verdict == Verdict::NoBlowup);

  c = moment_certificate(ledger(-1.0, -5.0), p);
  CHECK(c.verdict == Verdict::InequalityViolated);

  auto with_cap = ledger(-1.0, -7.0);
  with_cap.events.push_back({0.9, "h1_cap", ""});
  c = moment_certificate(with_cap, p);
  CHECK(c.verdict == Verdict::CertifiedConsistent);
  REQUIRE(c.T_star);
  CHECK(*c.T_star == 0.9);

  c = moment_certificate(ledger(0.5, 0.0), p);
  CHECK_FALSE(c.T_ub);

  auto touching = ledger(-1.0, -6.0);
  touching.samples[4].x_right = 10.0;
  CHECK(code_of([&] { moment_certificate(touching, p); }) == Errc::BoundaryContact);
  CHECK(code_of([&] { moment_certificate(ledger(-1, 0), params(2, 4, 1, 1, 10, 100)); }) ==
        Errc::ExponentOutOfRange);
}

TEST_CASE("support edges") {
  CHECK(support_edges(grid(64, 2.0, [](double) { return 0.0; }), 1e-6).empty);
  const auto bump = grid(256, 2.0, [](double x) { return std::abs(x) <= 1.0 ? 1.0 : 0.0; });
  const auto e = support_edges(bump, 0.5);
  CHECK(std::abs(e.left + 1.0) <= bump.dx());
  CHECK(std::abs(e.right - 1.0) <= bump.dx());
  const double lift = std::pow(1e-6, 0.3);
  const auto lifted = grid(64, 2.0, [&](double x) { return lift + (std::abs(x) < 1 ? 1.0 : 0.0); });
  CHECK(support_edges(lifted, 0.1 * lift).full);
  CHECK_FALSE(support_edges(lifted, 10 * lift).full);
}

TEST_CASE("spreading fit") {
  SupportTrace tr;
  tr.r0 = 0.1;
  for (int i = 0; i < 200; ++i) {
    const double t = std::pow(10.0, -3.0 + 3.0 * i / 199.0);
    tr.times.push_back(t);
    tr.Gamma.push_back(2.0 * std::pow(t, 0.2));
    tr.left_edges.push_back(0.0);
    tr.right_edges.push_back(0.0);
  }
  const auto f = fit_spreading_exponent(tr, 1e-2, 1e-1, 1e-3);
  CHECK(f.exponent == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(f.C == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.residual < 1e-12);
  CHECK(code_of([&] { fit_spreading_exponent(tr, 1e-2, 1e-1, 1.0); }) == Errc::InsufficientSpread);
  CHECK(code_of([&] { fit_spreading_exponent(tr, 1e-2, 1.05e-2, 1e-3); }) == Errc::InsufficientSpread);
}

TEST_CASE("support trace uses a running maximum") {
  RunLedger l;
  const double rs[] = {0.1, 0.3, 0.25, 0.5};
  for (int i = 0; i < 4; ++i) {
    FunctionalSample s;
    s.t = i;
    s.x_left = -rs[i];
    s.x_right = rs[i];
    l.push(s);
  }
  const auto tr = support_trace(l, 0.2);
  CHECK(tr.Gamma[0] == 0.0);
  CHECK(tr.Gamma[1] == doctest::Approx(0.1));
  CHECK(tr.Gamma[2] == doctest::Approx(0.1));
  CHECK(tr.Gamma[3] == doctest::Approx(0.3));
}

TEST_CASE("localized integrals") {
  const double r0 = 0.5, a = 2.0;
  std::vector<Snapshot> snaps;
  for (int k = 0; k < 4; ++k) {
    const double w = 0.5 + 0.4 * k;  // support half-width grows
    snaps.push_back({0.1 * k, grid(128, a, [&](double x) { return std::max(0.0, 1.0 - x * x / (w * w)); })});
  }
  const std::vector<double> s = {0.0, 0.25, 0.5, 1.0, 1.5, 2.0};
  const std::vector<double> xi = {1.0, 2.0};
  const auto G = localized_integrals(snaps, r0, s, xi);
  for (const auto& row : G) {
    for (std::size_t j = 1; j < s.size(); ++j) CHECK(row[j] <= row[j - 1]);
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s[j] >= a - r0) CHECK(row[j] == 0.0);
    }
    CHECK(row[0] > 0.0);
  }
  std::vector<Snapshot> inside;
  for (int k = 0; k < 3; ++k) {
    inside.push_back({0.1 * k, grid(128, a, [&](double x) { return std::max(0.0, 1.0 - x * x / (r0 * r0)); })});
  }
  const std::vector<double> pos = {1e-9, 0.3, 1.0};
  for (const auto& row : localized_integrals(inside, r0, pos, xi)) {
    for (double v : row) CHECK(v == 0.0);
  }
}

TEST_CASE("Stampacchia evaluator") {
  auto single = [](double c, double beta, double alpha, double g) {
    StampacchiaSystem s;
    s.c = {c};
    s.beta = {beta};
    s.alpha = {alpha};
    s.G = {[g](double) { return g; }};
    return s;
  };
  CHECK(stampacchia_s0(single(1, 2, 1, 0.0), 0.3).s0 == 0.3);
  CHECK(stampacchia_s0(single(1, 2, 1, 0.25), 0.3).s0 == doctest::Approx(1.3).epsilon(1e-14));

  // second function with alpha = 0 enters through H
  StampacchiaSystem two;
  two.c = {1.0, 1.0};
  two.beta = {2.0, 2.0};
  two.alpha = {1.0, 0.0};
  two.G = {[](double) { return 0.1; }, [](double) { return 0.01; }};
  const auto r = stampacchia_s0(two, 0.0);
  CHECK(r.H == doctest::Approx(16.0 * 0.01).epsilon(1e-12));
  two.G[1] = [](double) { return 1.0; };
  CHECK(code_of([&] { stampacchia_s0(two, 0.0); }) == Errc::HypothesisFailed);

  auto bad = single(1, 2, 1, 0.1);
  bad.beta = {1.0};
  CHECK(code_of([&] { stampacchia_s0(bad, 0.0); }) == Errc::BadShape);
  bad = single(1, 2, 1, 0.1);
  bad.alpha.push_back(1.0);
  CHECK(code_of([&] { stampacchia_s0(bad, 0.0); }) == Errc::BadShape);
  bad = single(1, 2, 1, 0.1);
  bad.c_user = 1.0;
  CHECK(code_of([&] { stampacchia_s0(bad, 0.0); }) == Errc::BadShape);
}

TEST_CASE("tabulated interpolant") {
  const auto f = tabulated({0.0, 1.0, 2.0}, {4.0, 2.0, 0.0});
  CHECK(f(-1.0) == 4.0);
  CHECK(f(0.5) == 3.0);
  CHECK(f(5.0) == 0.0);
  CHECK_THROWS_AS(tabulated({0.0}, {1.0, 2.0}), Error);
}
