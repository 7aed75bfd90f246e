#pragma once

#include <span>
#include <vector>

#include "thinfilm/field.hpp"
#include "thinfilm/model.hpp"

namespace thinfilm {

// ---- regularized coefficients -------------------------------------------

/// f(z) = |z|^(4+n) / (|z|^4 + eps |z|^n) + delta; equals delta at z = 0 when eps > 0.
double mobility(double z, double n, double eps, double delta);
/// df/dz for z > 0.
double mobility_derivative(double z, double n, double eps);

/// Face mobility (u1 - u0) / int_{u0}^{u1} ds / f(s) for delta = 0; it
/// vanishes as either node tends to 0. Falls back to the arithmetic mean when
/// delta > 0. d0, d1 are the partial derivatives in u0, u1.
struct FaceMobility {
  double value = 0.0;
  double d0 = 0.0;
  double d1 = 0.0;
};
FaceMobility face_mobility(double u0, double u1, double n, double eps, double delta);

/// D''_eps(z) = |z|^(m-n) / (1 + eps |z|^(m-n)), bounded by 1/eps.
double pressure_coupling(double z, double n, double m, double eps);
/// d/dz of pressure_coupling for z > 0.
double pressure_coupling_derivative(double z, double n, double m, double eps);

// ---- entropies ------------------------------------------------------------

/// Entropy density with G''(z) = z^alpha / f(z) (delta = 0). alpha = 0 selects
/// the plain entropy with G'' = z^-n (+ eps z^-4).
struct EntropySpec {
  double n = 1.0;
  double alpha = 0.0;
  double eps = 0.0;
  double offset = 0.0;  // smallest constant keeping G >= 0 on (0, inf)
};

/// Builds a spec and computes its offset.
EntropySpec make_entropy_spec(double n, double alpha = 0.0, double eps = 0.0);

double entropy_density(double z, const EntropySpec& spec);
/// The closed-form G''(z) the density is built from.
double entropy_density_second_derivative(double z, const EntropySpec& spec);

/// Rectangle-rule integral of G(h).
double entropy_value(const Field& h, const EntropySpec& spec);

// ---- potential and energy -------------------------------------------------

/// D0 with D0'' = z^(m-n); log branches at m - n = -2 and -1.
double potential_D0(double z, const Exponent& n, const Exponent& m);

/// D_eps(z) = int_1^z (z - s) D''_eps(s) ds. Differs from D0 by an affine
/// function of z when eps = 0.
double regularized_potential(double z, double n, double m, double eps);

/// int h_x^2 with face differences (h_{i+1} - h_i)/dx.
double hx_sq(const Field& h);
/// sqrt(int h^2 + int h_x^2).
double h1_norm(const Field& h);

/// int { a0/2 h_x^2 - a1 D0(h) }.
double energy(const Field& h, const ProblemParams& p);
/// Same with D_eps in place of D0: the energy dissipated by the regularized flow.
double regularized_energy(const Field& h, const ProblemParams& p, double eps);

/// int x^2 z^(2-n)/(2-n) with x measured from the domain center; 0 < n < 2.
double second_moment_entropy(const Field& h, double n);
/// int x^2 h_xx^2 with the standard three-point second difference.
double moment_hxx(const Field& h);

// ---- time series ----------------------------------------------------------

struct FunctionalSample {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double entropy = 0.0;
  double alpha_entropy = 0.0;
  double hx_sq = 0.0;
  double sup = 0.0;
  double moment = 0.0;
  double B1 = 0.0;
  double B2 = 0.0;
  double Btilde = 0.0;
  double x_left = 0.0;
  double x_right = 0.0;
  // not part of the CSV columns
  double energy_eps = 0.0;
  double dissipation = 0.0;  // accumulated int f (a0 h_xxx + a1 D'' h_x)^2
  double moment_hxx = 0.0;
  double h1 = 0.0;
};

enum class HistoryMode { B1, B2, Btilde };

/// Trapezoid-in-time accumulation of the weight integrand, one value per sample.
std::vector<double> weighted_history_series(std::span<const FunctionalSample> samples,
                                            const ProblemParams& p, HistoryMode mode);
/// Final accumulated value; 0 for fewer than two samples.
double weighted_history(std::span<const FunctionalSample> samples, const ProblemParams& p,
                        HistoryMode mode);

}  // namespace thinfilm
