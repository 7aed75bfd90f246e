#pragma once

#include <optional>
#include <string_view>

#include "thinfilm/rational.hpp"

namespace thinfilm {

/// Exponents, coefficients and grid of h_t = -a0 (h^n h_xxx)_x - a1 (h^m h_x)_x
/// on the periodic interval (-a, a).
struct ProblemParams {
  Exponent n{1.0};
  Exponent m{1.0};
  double a0 = 1.0;
  double a1 = 1.0;
  double a = 1.0;  // half-width
  int nx = 256;

  double length() const noexcept { return 2.0 * a; }
  double dx() const noexcept { return length() / nx; }
  /// Throws Error(InvalidArgument) when an invariant fails.
  void validate() const;
};

enum class Regime { Subcritical, Critical, Supercritical };

std::string_view to_string(Regime r) noexcept;

struct TheoremFlags {
  bool existence_ok = false;
  bool fsp_ok = false;
  bool blowup_ok = false;
};

struct RegimeReport {
  Regime regime = Regime::Subcritical;
  bool existence_ok = false;
  bool fsp_ok = false;
  bool blowup_ok = false;
  double unstable_band_edge = 0.0;
  std::optional<double> critical_mass;
};

/// Exact trichotomy on m - (n + 2).
Regime classify_regime(const ProblemParams& p);

TheoremFlags theorem_applicability(const ProblemParams& p);

/// Regime, theorem flags, band edge at `hbar`, and M_c when critical with a1 > 0.
RegimeReport regime_report(const ProblemParams& p, double hbar = 1.0, double eps_interp = 0.1);

/// Linear growth rate of the mode cos(xi x) about the flat state hbar:
///   sigma = -a0 xi^2 hbar^n (xi^2 - (a1/a0) hbar^(m-n)).
double growth_rate(double xi, double hbar, const ProblemParams& p);

/// Wavenumber where the growth rate changes sign.
double band_edge(double hbar, const ProblemParams& p);

/// Wavenumber of maximal growth, xi*^2 = a1/(2 a0) hbar^(m-n).
double most_unstable_wavenumber(double hbar, const ProblemParams& p);

/// Critical mass sqrt(6 a0 / (a1 k1)) of the critical regime m = n + 2,
/// with k1 the interpolation constant at p = 4.
double critical_mass(const ProblemParams& p, double eps_interp = 0.1);

}  // namespace thinfilm
