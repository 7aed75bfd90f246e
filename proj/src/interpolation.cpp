#include "thinfilm/interpolation.hpp"

#include <cmath>

#include "thinfilm/errors.hpp"

namespace thinfilm {

InterpolationConstants interpolation_constants(double p, double length, double eps_interp) {
  if (!(p >= 1.0)) throw Error(Errc::InvalidArgument, "interpolation exponent must be >= 1");
  if (!(eps_interp > 0.0 && eps_interp < 1.0)) {
    throw Error(Errc::InvalidArgument, "interpolation epsilon must lie in (0,1)");
  }
  if (!(length > 0.0)) throw Error(Errc::InvalidArgument, "domain length must be positive");
  InterpolationConstants k;
  k.k1 = std::pow(2.0, (4.0 - p) / 3.0) * std::pow(3.0, 2.0 * (p - 1.0) / 3.0) / (1.0 - eps_interp);
  if (p == 1.0) {
    // limit p -> 1+ of the general expression
    k.k2 = 1.0;
  } else {
    const double base = 1.0 - std::pow(1.0 - eps_interp, 1.0 / (p - 1.0));
    k.k2 = std::pow(length, 1.0 - p) * std::pow(base, 1.0 - p);
  }
  return k;
}

double interpolation_bound(double p, double mass, double hx_sq, double length, double eps_interp) {
  if (!(mass > 0.0)) throw Error(Errc::InvalidArgument, "mass must be positive");
  if (!(hx_sq >= 0.0)) throw Error(Errc::InvalidArgument, "gradient integral must be nonnegative");
  const auto k = interpolation_constants(p, length, eps_interp);
  // ||h||_1 = M for nonnegative h
  if (p == 1.0) return mass;
  return k.k1 * std::pow(mass, (p + 2.0) / 3.0) * std::pow(hx_sq, (p - 1.0) / 3.0) +
         k.k2 * std::pow(mass, p);
}

}  // namespace thinfilm
