#pragma once

namespace thinfilm {

/// Constants of the mass/gradient interpolation bound
///   ||h||_p^p <= k1 M^((p+2)/3) (int h_x^2)^((p-1)/3) + k2 M^p,   p >= 1,
/// for nonnegative h on an interval of length `length`; eps_interp in (0,1).
struct InterpolationConstants {
  double k1 = 0.0;
  double k2 = 0.0;
};

InterpolationConstants interpolation_constants(double p, double length, double eps_interp);

/// Right-hand side of the bound. p = 1 returns M exactly.
double interpolation_bound(double p, double mass, double hx_sq, double length, double eps_interp);

}  // namespace thinfilm
