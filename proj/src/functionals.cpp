#include "thinfilm/functionals.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

constexpr double kBranchTol = 1e-12;

bool near(double a, double b) { return std::abs(a - b) < kBranchTol; }

struct GaussLegendre {
  static constexpr int kOrder = 16;
  std::array<double, kOrder> node{};
  std::array<double, kOrder> weight{};

  GaussLegendre() {
    for (int i = 0; i < kOrder; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= kOrder; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      node[i] = x;
      weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendre& gauss_legendre() {
  static const GaussLegendre gl;
  return gl;
}

// Entropy density without the offset.
double entropy_raw(double z, const EntropySpec& s) {
  const double q = s.n - s.alpha;
  double g;
  if (near(q, 1.0)) {
    g = z * std::log(z) - z + 1.0;
  } else if (near(q, 2.0)) {
    g = -std::log(z) + z / std::numbers::e;
  } else {
    g = std::pow(z, 2.0 - q) / ((2.0 - q) * (1.0 - q));
    if (q > 1.0 && q < 2.0) g += z;
  }
  if (s.eps > 0.0) {
    g += s.eps * std::pow(z, s.alpha - 2.0) / ((s.alpha - 3.0) * (s.alpha - 2.0));
  }
  return g;
}

// Golden-section minimum of a unimodal function of u = log z.
template <class F>
double golden_min(F&& f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - r * (hi - lo);
  double d = lo + r * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > 1e-10) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - r * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + r * (hi - lo);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

double center(const Field& h) { return h.origin() + 0.5 * h.length(); }

}  // namespace

double mobility(double z, double n, double eps, double delta) {
  z = std::abs(z);
  if (z == 0.0) {
    if (eps == 0.0) throw Error(Errc::DomainError, "mobility at z = 0 needs eps > 0");
    return delta;
  }
  // z^n / (1 + eps z^(n-4)) avoids overflow for large z
  return std::pow(z, n) / (1.0 + eps * std::pow(z, n - 4.0)) + delta;
}

double mobility_derivative(double z, double n, double eps) {
  if (!(z > 0.0)) throw Error(Errc::DomainError, "mobility derivative needs z > 0");
  // f = z^4 / (w + eps) with w = z^(4-n)
  const double w = std::pow(z, 4.0 - n);
  const double den = w + eps;
  return z * z * z * (n * w + 4.0 * eps) / (den * den);
}

FaceMobility face_mobility(double u0, double u1, double n, double eps, double delta) {
  if (!(u0 > 0.0) || !(u1 > 0.0)) throw Error(Errc::DomainError, "face mobility needs positive nodes");
  FaceMobility fm;
  const double mid = 0.5 * (u0 + u1);
  const double d = u1 - u0;
  if (delta > 0.0) {
    fm.value = 0.5 * (mobility(u0, n, eps, delta) + mobility(u1, n, eps, delta));
    fm.d0 = 0.5 * mobility_derivative(u0, n, eps);
    fm.d1 = 0.5 * mobility_derivative(u1, n, eps);
    return fm;
  }
  if (std::abs(d) < 1e-2 * mid) {
    // 3-point Gauss mean of 1/f, exact to O((d/mid)^6)
    const double r = 0.5 * d * std::sqrt(0.6);
    const double mean_inv = (5.0 / 18.0) * (1.0 / mobility(mid - r, n, eps, 0.0) + 1.0 / mobility(mid + r, n, eps, 0.0)) +
                            (8.0 / 18.0) / mobility(mid, n, eps, 0.0);
    fm.value = 1.0 / mean_inv;
    fm.d0 = fm.d1 = 0.5 * mobility_derivative(mid, n, eps);
    return fm;
  }
  // 1/f = z^-n + eps z^-4
  auto phi = [&](double z) {
    const double p = n == 1.0 ? std::log(z) : std::pow(z, 1.0 - n) / (1.0 - n);
    return p - eps / (3.0 * z * z * z);
  };
  const double S = phi(u1) - phi(u0);
  fm.value = d / S;
  fm.d0 = (d / mobility(u0, n, eps, 0.0) - S) / (S * S);
  fm.d1 = (S - d / mobility(u1, n, eps, 0.0)) / (S * S);
  return fm;
}

double pressure_coupling(double z, double n, double m, double eps) {
  z = std::abs(z);
  const double k = m - n;
  if (z == 0.0) {
    if (k > 0.0) return 0.0;
    if (k == 0.0) return 1.0 / (1.0 + eps);
    if (eps == 0.0) throw Error(Errc::DomainError, "D'' at z = 0 with m < n needs eps > 0");
    return 1.0 / eps;
  }
  return 1.0 / (std::pow(z, -k) + eps);
}

double pressure_coupling_derivative(double z, double n, double m, double eps) {
  if (!(z > 0.0)) throw Error(Errc::DomainError, "D''' needs z > 0");
  const double k = m - n;
  const double w = std::pow(z, -k);
  const double den = w + eps;
  return k * w / z / (den * den);
}

EntropySpec make_entropy_spec(double n, double alpha, double eps) {
  if (!(n > 0.0)) throw Error(Errc::InvalidArgument, "entropy exponent n must be > 0");
  if (!(eps >= 0.0)) throw Error(Errc::InvalidArgument, "entropy eps must be >= 0");
  if (alpha != 0.0 && !(alpha > -0.5 && alpha < 1.0)) {
    throw Error(Errc::InvalidArgument, "alpha must lie in (-1/2, 1)");
  }
  EntropySpec s{n, alpha, eps, 0.0};
  const double q = n - alpha;
  if (q > 1.0 && q < 2.0 && !near(q, 1.0) && !near(q, 2.0)) {
    const double lo = -700.0, hi = 700.0;
    const double gmin = golden_min([&](double u) { return entropy_raw(std::exp(u), s); }, lo, hi);
    // rounding guard keeps the sampled minimum on the nonnegative side
    s.offset = -gmin + 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(gmin));
  }
  return s;
}

double entropy_density(double z, const EntropySpec& spec) {
  if (!(z > 0.0)) {
    const double q = spec.n - spec.alpha;
    const bool finite_at_zero = spec.eps == 0.0 && q < 2.0 && !near(q, 2.0);
    if (z == 0.0 && finite_at_zero) {
      if (near(q, 1.0)) return 1.0;
      return spec.offset;
    }
    throw Error(Errc::NonpositiveField, "entropy needs a positive argument");
  }
  return entropy_raw(z, spec) + spec.offset;
}

double entropy_density_second_derivative(double z, const EntropySpec& spec) {
  double g = std::pow(z, spec.alpha - spec.n);
  if (spec.eps > 0.0) g += spec.eps * std::pow(z, spec.alpha - 4.0);
  return g;
}

double entropy_value(const Field& h, const EntropySpec& spec) {
  double s = 0.0;
  for (double v : h.values()) s += entropy_density(v, spec);
  return s * h.dx();
}

double potential_D0(double z, const Exponent& n, const Exponent& m) {
  const Rational one(1), zero(0);
  if (compare_affine(m, one, zero, n, one, Rational(-2)) == 0) {
    if (!(z > 0.0)) throw Error(Errc::DomainError, "-log z needs z > 0");
    return -std::log(z);
  }
  if (compare_affine(m, one, zero, n, one, Rational(-1)) == 0) {
    if (!(z > 0.0)) throw Error(Errc::DomainError, "z log z needs z > 0");
    return z * std::log(z);
  }
  const double k = m.value - n.value;
  if (z < 0.0) throw Error(Errc::DomainError, "potential needs z >= 0");
  return std::pow(z, k + 2.0) / ((k + 1.0) * (k + 2.0));
}

double regularized_potential(double z, double n, double m, double eps) {
  if (!(z > 0.0)) throw Error(Errc::DomainError, "regularized potential needs z > 0");
  // substitute s = e^u on [0, log z], unit-length panels
  const double L = std::log(z);
  if (L == 0.0) return 0.0;
  const auto& gl = gauss_legendre();
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(L))));
  const double w = L / panels;
  double acc = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = (k + 0.5) * w;
    for (int i = 0; i < GaussLegendre::kOrder; ++i) {
      const double u = mid + 0.5 * w * gl.node[i];
      const double s = std::exp(u);
      acc += gl.weight[i] * (z - s) * pressure_coupling(s, n, m, eps) * s;
    }
  }
  return acc * 0.5 * w;
}

double hx_sq(const Field& h) {
  const std::size_t N = h.size();
  const double inv = 1.0 / h.dx();
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double d = (h[(i + 1) % N] - h[i]) * inv;
    s += d * d;
  }
  return s * h.dx();
}

double h1_norm(const Field& h) {
  double s = 0.0;
  for (double v : h.values()) s += v * v;
  return std::sqrt(s * h.dx() + hx_sq(h));
}

double energy(const Field& h, const ProblemParams& p) {
  double pot = 0.0;
  if (p.a1 != 0.0) {
    for (double v : h.values()) pot += potential_D0(v, p.n, p.m);
    pot *= h.dx();
  }
  return 0.5 * p.a0 * hx_sq(h) - p.a1 * pot;
}

double regularized_energy(const Field& h, const ProblemParams& p, double eps) {
  double pot = 0.0;
  if (p.a1 != 0.0) {
    for (double v : h.values()) pot += regularized_potential(v, p.n.value, p.m.value, eps);
    pot *= h.dx();
  }
  return 0.5 * p.a0 * hx_sq(h) - p.a1 * pot;
}

double second_moment_entropy(const Field& h, double n) {
  if (!(n > 0.0 && n < 2.0)) throw Error(Errc::ExponentOutOfRange, "second moment needs 0 < n < 2");
  const double c = center(h);
  double s = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i] < 0.0) throw Error(Errc::NonpositiveField, "second moment needs h >= 0");
    const double x = h.x(i) - c;
    s += x * x * std::pow(h[i], 2.0 - n);
  }
  return s * h.dx() / (2.0 - n);
}

double moment_hxx(const Field& h) {
  const double c = center(h);
  const double inv = 1.0 / (h.dx() * h.dx());
  const auto N = static_cast<std::ptrdiff_t>(h.size());
  double s = 0.0;
  for (std::ptrdiff_t i = 0; i < N; ++i) {
    const double d = (h.wrap(i + 1) - 2.0 * h[i] + h.wrap(i - 1)) * inv;
    const double x = h.x(static_cast<std::size_t>(i)) - c;
    s += x * x * d * d;
  }
  return s * h.dx();
}

std::vector<double> weighted_history_series(std::span<const FunctionalSample> samples,
                                            const ProblemParams& p, HistoryMode mode) {
  const double n = p.n.value, m = p.m.value;
  const double a0 = p.a0, a1 = p.a1;
  auto integrand = [&](double sup) -> double {
    switch (mode) {
      case HistoryMode::B1:
        return a1 * a1 / a0 * std::pow(sup, 2.0 * m - n);
      case HistoryMode::B2: {
        if (a1 == 0.0) return 0.0;
        const double k1 = 2.0 * m - n + 1.0, k2 = m - n + 1.0;
        if (k1 == 0.0 || k2 == 0.0) throw Error(Errc::DomainError, "B2 weight undefined for this (n, m)");
        return std::pow(a1, 4) / (2.0 * a0 * a0 * a0 * k1 * k1) * std::pow(sup, 4.0 * m - n) +
               a1 * a1 / (2.0 * a0 * k2 * k2) * std::pow(sup, 2.0 * m - n);
      }
      case HistoryMode::Btilde: {
        const double f = std::abs((1.0 - n) * (2.0 - n));
        if (f == 0.0 || a1 == 0.0) return 0.0;
        const double k2 = m - n + 1.0;
        if (k2 == 0.0) throw Error(Errc::DomainError, "B-tilde weight undefined for m = n - 1");
        return a1 * a1 * f / (2.0 * a0 * k2 * k2) * std::pow(sup, 2.0 * m - n);
      }
    }
    return 0.0;
  };
  std::vector<double> out(samples.size(), 0.0);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double dt = samples[i].t - samples[i - 1].t;
    if (dt < 0.0) throw Error(Errc::UnorderedSamples, "sample times must be nondecreasing");
    out[i] = out[i - 1] + 0.5 * dt * (integrand(samples[i - 1].sup) + integrand(samples[i].sup));
  }
  return out;
}

double weighted_history(std::span<const FunctionalSample> samples, const ProblemParams& p,
                        HistoryMode mode) {
  const auto s = weighted_history_series(samples, p, mode);
  return s.empty() ? 0.0 : s.back();
}

}  // namespace thinfilm
