#include <cmath>
#include <random>

#include "doctest.h"
#include "thinfilm/errors.hpp"
#include "thinfilm/interpolation.hpp"
#include "thinfilm/model.hpp"
#include "thinfilm/rational.hpp"

using namespace thinfilm;

namespace {

ProblemParams params(std::string_view n, std::string_view m, double a0 = 1.0, double a1 = 1.0) {
  ProblemParams p;
  p.n = Exponent::parse(n);
  p.m = Exponent::parse(m);
  p.a0 = a0;
  p.a1 = a1;
  return p;
}

}  // namespace

TEST_CASE("rational parsing and exact comparison") {
  CHECK(Rational::parse("2/7")->num() == 2);
  CHECK(Rational::parse("2/7")->den() == 7);
  CHECK(Rational::parse("-0.25")->num() == -1);
  CHECK(Rational::parse("-0.25")->den() == 4);
  CHECK(Rational::parse("1.5e-3")->den() == 2000);
  CHECK(Rational::parse("6/4")->num() == 3);
  CHECK_FALSE(Rational::parse("abc"));
  CHECK_FALSE(Rational::parse("1/0"));
  CHECK(compare(Rational(1, 3), Rational(2, 6)) == 0);
  CHECK(compare(Rational(1, 3), Rational(1, 2)) < 0);
  const auto big = Rational(INT64_MAX);
  CHECK_FALSE(add(big, big));
  CHECK(Rational::from_double(0.375)->den() == 8);
  CHECK_FALSE(Rational::from_double(std::nan("")));
}

TEST_CASE("regime classification") {
  CHECK(classify_regime(params("1", "3")) == Regime::Critical);
  CHECK(classify_regime(params("1", "1")) == Regime::Subcritical);
  CHECK(classify_regime(params("0.5", "4")) == Regime::Supercritical);
  // 0.1 + 2 != 2.1 in binary floating point; the exact path must still see equality
  CHECK(classify_regime(params("0.1", "2.1")) == Regime::Critical);
  CHECK(classify_regime(params("1/3", "7/3")) == Regime::Critical);
}

TEST_CASE("theorem applicability examples") {
  auto f = theorem_applicability(params("1", "3"));
  CHECK(f.existence_ok);
  CHECK(f.fsp_ok);
  CHECK(f.blowup_ok);
  f = theorem_applicability(params("3.5", "2"));
  CHECK(f.existence_ok);
  CHECK_FALSE(f.fsp_ok);
  CHECK_FALSE(f.blowup_ok);
  f = theorem_applicability(params("0.25", "5.9"));
  CHECK_FALSE(f.fsp_ok);
  CHECK_FALSE(f.blowup_ok);
  // boundary m = 4 - n is inside the blow-up region, m = 6 - n is not
  CHECK(theorem_applicability(params("0.25", "3.75")).blowup_ok);
  CHECK_FALSE(theorem_applicability(params("0.25", "5.75")).blowup_ok);
  CHECK(theorem_applicability(params("1.5", "3.5")).blowup_ok);
  CHECK_FALSE(theorem_applicability(params("1.5", "3.4")).blowup_ok);
}

TEST_CASE("blow-up and finite-speed regions sit inside the existence region") {
  // the regions are unions of polygons in (n, m); scan a fine rational grid
  for (int i = 1; i <= 80; ++i) {
    for (int j = 0; j <= 160; ++j) {
      ProblemParams p;
      p.n = Exponent(Rational(i, 20));
      p.m = Exponent(Rational(j, 20));
      const auto f = theorem_applicability(p);
      if (f.blowup_ok) {
        CHECK(f.existence_ok);
        CHECK(f.fsp_ok);
      }
      if (f.fsp_ok) CHECK(f.existence_ok);
    }
  }
}

TEST_CASE("growth rate examples and properties") {
  const auto p = params("1", "1");
  CHECK(growth_rate(std::sqrt(0.5), 1.0, p) == doctest::Approx(0.25).epsilon(1e-14));
  const double edge = band_edge(1.0, p);
  CHECK(growth_rate(edge, 1.0, p) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(growth_rate(0.0, 1.0, p) == 0.0);

  const auto stable = params("1", "1", 1.0, 0.0);
  for (double xi : {0.1, 1.0, 7.0}) CHECK(growth_rate(xi, 1.3, stable) < 0.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int k = 0; k < 50; ++k) {
    auto q = params("1.5", "2.5", u(rng), u(rng));
    const double hbar = u(rng), xi = u(rng);
    CHECK(growth_rate(xi, hbar, q) == growth_rate(-xi, hbar, q));
    // xi* maximizes sigma: compare with a dense scan
    const double star = most_unstable_wavenumber(hbar, q);
    const double top = growth_rate(star, hbar, q);
    const double e = band_edge(hbar, q);
    for (int s = 0; s <= 400; ++s) CHECK(growth_rate(e * s / 400.0, hbar, q) <= top * (1 + 1e-12));
    CHECK(star * star == doctest::Approx(e * e / 2.0));
  }
}

TEST_CASE("critical mass") {
  const auto p = params("1", "3");
  CHECK(interpolation_constants(4.0, p.length(), 0.1).k1 == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(critical_mass(p, 0.1) == doctest::Approx(std::sqrt(0.6)).epsilon(1e-12));
  CHECK(critical_mass(params("1", "3", 4.0, 1.0), 0.1) == doctest::Approx(2.0 * std::sqrt(0.6)).epsilon(1e-12));
  CHECK_THROWS_AS(critical_mass(params("1", "2")), Error);
  try {
    critical_mass(params("1", "2"));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotCritical);
  }
  try {
    critical_mass(params("1", "3", 1.0, 0.0));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroDestabilization);
  }
}

TEST_CASE("regime report") {
  const auto r = regime_report(params("1", "3"));
  CHECK(r.regime == Regime::Critical);
  REQUIRE(r.critical_mass);
  CHECK(*r.critical_mass == doctest::Approx(std::sqrt(0.6)));
  CHECK(r.unstable_band_edge == doctest::Approx(1.0));
  CHECK_FALSE(regime_report(params("1", "1")).critical_mass);
}

TEST_CASE("problem validation") {
  ProblemParams p;
  CHECK_NOTHROW(p.validate());
  p.nx = 15;
  CHECK_THROWS_AS(p.validate(), Error);
  p.nx = 8;
  CHECK_THROWS_AS(p.validate(), Error);
  p = ProblemParams{};
  p.a1 = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = ProblemParams{};
  p.n = Exponent(0.0);
  CHECK_THROWS_AS(p.validate(), Error);
}
