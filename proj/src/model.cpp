#include "thinfilm/model.hpp"

#include <cmath>
#include <string>

#include "thinfilm/errors.hpp"
#include "thinfilm/interpolation.hpp"

namespace thinfilm {

namespace {

const Rational kOne{1};
const Rational kZero{0};

// sign(x - c) for exponent x and rational constant c
int cmp(const Exponent& x, Rational c) {
  return compare_affine(x, kOne, kZero, Exponent(c), kOne, kZero);
}

// sign((x_scale*x) - (y_scale*y + offset))
int cmp(const Exponent& x, Rational x_scale, const Exponent& y, Rational y_scale, Rational offset) {
  return compare_affine(x, x_scale, kZero, y, y_scale, offset);
}

}  // namespace

void ProblemParams::validate() const {
  if (!(n.value > 0.0)) throw Error(Errc::InvalidArgument, "n must be > 0");
  if (!(m.value > 0.0)) throw Error(Errc::InvalidArgument, "m must be > 0");
  if (!(a0 > 0.0)) throw Error(Errc::InvalidArgument, "a0 must be > 0");
  if (!(a1 >= 0.0)) throw Error(Errc::InvalidArgument, "a1 must be >= 0");
  if (!(a > 0.0)) throw Error(Errc::InvalidArgument, "domain half-width a must be > 0");
  if (nx < 16 || nx % 2 != 0) {
    throw Error(Errc::InvalidArgument, "grid point count must be even and >= 16 (got " + std::to_string(nx) + ")");
  }
}

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Subcritical: return "Subcritical";
    case Regime::Critical: return "Critical";
    case Regime::Supercritical: return "Supercritical";
  }
  return "Unknown";
}

Regime classify_regime(const ProblemParams& p) {
  const int s = cmp(p.m, kOne, p.n, kOne, Rational(2));
  if (s < 0) return Regime::Subcritical;
  if (s == 0) return Regime::Critical;
  return Regime::Supercritical;
}

TheoremFlags theorem_applicability(const ProblemParams& p) {
  const Exponent& n = p.n;
  const Exponent& m = p.m;
  const Rational half(1, 2);

  const bool n_pos = cmp(n, kZero) > 0;
  const bool n_le_half = n_pos && cmp(n, half) <= 0;
  const bool m_ge_half_n = cmp(m, kOne, n, half, kZero) >= 0;
  const bool m_gt_half_n = cmp(m, kOne, n, half, kZero) > 0;
  const bool m_lt_6_minus_n = cmp(m, kOne, n, Rational(-1), Rational(6)) < 0;
  const bool m_ge_4_minus_n = cmp(m, kOne, n, Rational(-1), Rational(4)) >= 0;
  const bool m_ge_n_plus_2 = cmp(m, kOne, n, kOne, Rational(2)) >= 0;

  TheoremFlags f;
  f.existence_ok = n_pos && m_ge_half_n;
  f.fsp_ok = (n_le_half && m_gt_half_n && m_lt_6_minus_n) ||
             (cmp(n, half) > 0 && cmp(n, Rational(3)) < 0 && m_ge_half_n);
  f.blowup_ok = (n_le_half && m_ge_4_minus_n && m_lt_6_minus_n) ||
                (cmp(n, half) > 0 && cmp(n, kOne) <= 0 && m_ge_4_minus_n) ||
                (cmp(n, kOne) > 0 && cmp(n, Rational(2)) < 0 && m_ge_n_plus_2);
  return f;
}

RegimeReport regime_report(const ProblemParams& p, double hbar, double eps_interp) {
  RegimeReport r;
  r.regime = classify_regime(p);
  const auto flags = theorem_applicability(p);
  r.existence_ok = flags.existence_ok;
  r.fsp_ok = flags.fsp_ok;
  r.blowup_ok = flags.blowup_ok;
  r.unstable_band_edge = band_edge(hbar, p);
  if (r.regime == Regime::Critical && p.a1 > 0.0) r.critical_mass = critical_mass(p, eps_interp);
  return r;
}

double growth_rate(double xi, double hbar, const ProblemParams& p) {
  const double xi2 = xi * xi;
  return -p.a0 * xi2 * std::pow(hbar, p.n.value) *
         (xi2 - (p.a1 / p.a0) * std::pow(hbar, p.m.value - p.n.value));
}

double band_edge(double hbar, const ProblemParams& p) {
  return std::sqrt((p.a1 / p.a0) * std::pow(hbar, p.m.value - p.n.value));
}

double most_unstable_wavenumber(double hbar, const ProblemParams& p) {
  return std::sqrt(0.5 * (p.a1 / p.a0) * std::pow(hbar, p.m.value - p.n.value));
}

double critical_mass(const ProblemParams& p, double eps_interp) {
  if (classify_regime(p) != Regime::Critical) {
    throw Error(Errc::NotCritical, "critical mass needs m = n + 2");
  }
  if (p.a1 == 0.0) throw Error(Errc::ZeroDestabilization, "critical mass needs a1 > 0");
  // k1 at p = m - n + 2 = 4 does not depend on the domain length
  const double k1 = interpolation_constants(4.0, p.length(), eps_interp).k1;
  return std::sqrt(6.0 * p.a0 / (p.a1 * k1));
}

}  // namespace thinfilm
