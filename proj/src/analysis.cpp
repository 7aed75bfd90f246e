#include "thinfilm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "thinfilm/errors.hpp"
#include "thinfilm/functionals.hpp"
#include "thinfilm/interpolation.hpp"

namespace thinfilm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

BasicConstants basic_constants(double p, double length, double r) {
  if (!(length > 0.0)) throw Error(Errc::InvalidArgument, "domain length must be positive");
  BasicConstants b;
  b.p = p;
  b.b1 = std::pow(length, p);
  const double a = (1.0 / r - 1.0 / p) / (1.0 / r + 0.5);
  b.b2 = std::pow(1.0 + r / 2.0, a * p);
  if (p <= 2.0) {
    b.b3 = b.b1 * std::pow(length, (2.0 - p) / p);
  } else {
    // the second branch is stated with r = 2
    const double a2 = 0.5 - 1.0 / p;
    const double b2_r2 = std::pow(2.0, a2 * p);
    b.b3 = std::pow(b.b1, (p + 2.0) / 2.0) * b2_r2;
  }
  b.b4 = std::pow(2.0, p - 1.0) * b.b3;
  b.b5 = std::pow(2.0 / length, p - 1.0);
  // Hoelder down from p = 2: b4(2) = 2 |Omega|^2, b5(2) = 2 / |Omega|
  const double b4_2 = 2.0 * length * length;
  const double b5_2 = 2.0 / length;
  b.b4_tilde = std::pow(length, 1.0 - p / 2.0) * std::pow(b4_2, p / 2.0);
  b.b5_tilde = std::pow(length, 1.0 - p / 2.0) * std::pow(b5_2, p / 2.0);
  return b;
}

ConstantsLedger constants_chain(const ProblemParams& pp, const SolverConfig& cfg, double mass,
                                double entropy0, double hx0_sq, std::optional<double> energy0) {
  ConstantsLedger k;
  const double n = pp.n.value, m = pp.m.value, a0 = pp.a0, a1 = pp.a1, L = pp.length();
  k.n = n;
  k.m = m;
  k.a0 = a0;
  k.a1 = a1;
  k.length = L;
  k.eps = cfg.eps;
  k.delta = cfg.delta;
  k.alpha = cfg.alpha;
  k.eps_interp = cfg.eps_interp;
  k.mass = mass;
  k.entropy0 = entropy0;
  k.hx0_sq = hx0_sq;

  const double a1sq = a1 * a1;
  k.p_exponent = 2.0 * (2.0 * m - n);
  k.energy_site = basic_constants(k.p_exponent, L);
  k.b2_p4 = basic_constants(4.0, L).b2;

  k.c1 = std::pow(mass, k.p_exponent) * k.energy_site.B5() / 2.0;
  k.c2 = a1sq / (4.0 * a0);
  k.c3 = a1sq * k.b2_p4 * k.b2_p4 / (16.0 * a0);
  k.c4 = a1sq * k.energy_site.B4() / (4.0 * a0);
  k.c5 = a1sq / (2.0 * a0) * (cfg.delta / (cfg.eps * cfg.eps));
  k.c6 = a1sq / (2.0 * a0) * k.c1;
  k.c7 = k.c3 + k.c4 + k.c5 + k.c6;

  const double q = m - n + 1.0;
  if (q > 0.0) {
    k.entropy_site = basic_constants(2.0 * q, L);
    k.c8 = a1sq / (2.0 * a0 * q * q) * k.entropy_site.B4();
    k.c9 = a1sq / (2.0 * a0 * q * q) * k.entropy_site.B5() * std::pow(mass, 2.0 * q);
  } else {
    k.entropy_site.p = 2.0 * q;
    k.c8 = kNaN;
    k.c9 = kNaN;
  }
  k.c10 = k.c8 + k.c9;
  k.c11 = 2.0 * k.c2 * a1 / (cfg.eps * a0) + 2.0 * k.c7;

  k.gamma1 = std::max(3.0, 2.0 * m - n);
  k.gamma2 = std::max(3.0, m - n + 1.0);
  k.gamma3 = std::max(cfg.alpha / 2.0 + m - n + 1.0, 2.0 * m - n + 1.0 - cfg.alpha / 2.0);
  k.K = std::pow(2.0, 1.0 / (k.gamma1 - 1.0)) * std::max(1.0, hx0_sq + 2.0 * k.c2 / a0 * entropy0);

  k.h1_bound = kNaN;
  k.beta = kNaN;
  if (energy0) {
    const double E0 = *energy0;
    const double s = m - n;  // m - n + 2 is the interpolation exponent
    const double poinc = 8.0 * std::sqrt(3.0) / 3.0 + 1.0 / L;
    const Regime regime = classify_regime(pp);
    if (a1 == 0.0) {
      k.h1_bound = E0 + a0 / 2.0 * poinc * mass * mass;
    } else if (regime == Regime::Subcritical && s + 2.0 >= 1.0 && s + 1.0 > 0.0) {
      const auto ik = interpolation_constants(s + 2.0, L, cfg.eps_interp);
      const double d = (s + 1.0) * (s + 2.0);
      const double c1s = std::pow(a1 * ik.k1 / d, 3.0 / (2.0 - s)) *
                         std::pow(8.0 * (s + 1.0) / (3.0 * a0), (s + 1.0) / (2.0 - s)) * (2.0 - s) / 3.0;
      const double c2s = a1 * ik.k2 / d;
      const double c3s = a0 / 2.0 * poinc;
      k.h1_bound = E0 + c1s * std::pow(mass, (s + 4.0) / (2.0 - s)) + c2s * std::pow(mass, s + 2.0) +
                   c3s * mass * mass;
    } else if (regime == Regime::Critical) {
      const auto ik = interpolation_constants(4.0, L, cfg.eps_interp);
      const double c4c = a1 * ik.k1 / (6.0 * a0);
      const double c5c = a1 * ik.k2 / 18.0;
      const double c6c = a0 / 3.0 * poinc;
      const double gap = 1.0 - c4c * mass * mass;
      if (gap > 0.0) {
        k.h1_bound = 2.0 / (3.0 * gap) * E0 + c5c / gap * std::pow(mass, 4) + c6c * mass * mass;
      }
    }
    if (std::isfinite(k.h1_bound)) {
      // the bound is enlarged until (4/a0)(E0 + K) >= 1
      k.beta = k.c10 * std::pow(std::max(1.0, 4.0 / a0 * k.h1_bound), k.gamma2);
      if (a1 == 0.0) k.beta = 0.0;
    }
  }
  return k;
}

double tloc_estimate(const ConstantsLedger& k, double hx_sq, double entropy) {
  if (!(k.c11 > 0.0)) return kInf;
  const double v = hx_sq + 2.0 * k.c2 / k.a0 * entropy;
  const double g = k.gamma1 - 1.0;
  const double cap = v > 1.0 ? std::pow(v, -g) : 1.0;
  return 9.0 / (20.0 * k.c11 * g) * cap;
}

double tloc_estimate(const ConstantsLedger& k, const Field& h) {
  return tloc_estimate(k, hx_sq(h), entropy_value(h, make_entropy_spec(k.n)));
}

double BihariBound::operator()(double t) const {
  const double g = gamma - 1.0;
  double base;
  if (v0 < 1.0) {
    const double t0 = (1.0 - v0) / c;
    if (t < t0) return v0 + c * t;
    base = 1.0 - c * g * (t - t0);
  } else {
    base = std::pow(v0, -g) - c * g * t;
  }
  if (base <= 0.0) return kInf;
  return std::pow(base, -1.0 / g);
}

BihariBound bihari_bound(double v0, double c, double gamma) {
  if (!(v0 >= 0.0) || !(c > 0.0) || !(gamma > 1.0)) {
    throw Error(Errc::InvalidArgument, "Bihari bound needs v0 >= 0, c > 0, gamma > 1");
  }
  BihariBound b{v0, c, gamma, 0.0};
  const double g = gamma - 1.0;
  if (v0 < 1.0) {
    b.blow_time = (1.0 - v0) / c + 1.0 / (c * g);
  } else {
    b.blow_time = std::pow(v0, -g) / (c * g);
  }
  return b;
}

WeightedBoundReport check_exp_weighted_bounds(const RunLedger& ledger, const ProblemParams& p,
                                              double tol_ineq) {
  WeightedBoundReport r;
  r.tol = tol_ineq;
  if (ledger.samples.empty()) return r;
  const auto b1 = weighted_history_series(ledger.samples, p, HistoryMode::B1);
  const auto b2 = weighted_history_series(ledger.samples, p, HistoryMode::B2);
  const auto& s0 = ledger.samples.front();
  const double init1 = s0.hx_sq;
  const double init2 = s0.hx_sq + s0.entropy;
  auto ratio = [](double lhs, double rhs) {
    if (rhs == 0.0) return lhs <= 0.0 ? 1.0 : kInf;
    return lhs / rhs;
  };
  for (std::size_t i = 0; i < ledger.samples.size(); ++i) {
    const auto& s = ledger.samples[i];
    WeightedBoundRow row;
    row.t = s.t;
    row.lhs1 = s.hx_sq;
    row.rhs1 = std::exp(b1[i]) * init1;
    row.lhs2 = s.hx_sq + s.entropy;
    row.rhs2 = std::exp(b2[i]) * init2;
    // a vanishing gradient compares at rounding level
    const double floor1 = 1e-14 * std::max(1.0, std::abs(row.rhs1));
    if (row.lhs1 > floor1) r.worst_ratio1 = std::max(r.worst_ratio1, ratio(row.lhs1, row.rhs1));
    r.worst_ratio2 = std::max(r.worst_ratio2, ratio(row.lhs2, row.rhs2));
    if (row.lhs1 > (1.0 + tol_ineq) * row.rhs1 + floor1) r.ok = false;
    if (row.lhs2 > (1.0 + tol_ineq) * row.rhs2) r.ok = false;
    r.rows.push_back(row);
  }
  return r;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::CertifiedConsistent: return "CertifiedConsistent";
    case Verdict::InequalityViolated: return "InequalityViolated";
    case Verdict::NoBlowup: return "NoBlowup";
  }
  return "Unknown";
}

BlowupCertificate moment_certificate(const RunLedger& ledger, const ProblemParams& p, double tol_ineq) {
  const double n = p.n.value;
  if (!(n > 0.0 && n < 2.0)) throw Error(Errc::ExponentOutOfRange, "moment certificate needs 0 < n < 2");
  if (ledger.samples.empty()) throw Error(Errc::EmptyData, "ledger has no samples");
  const double lo = -p.a + p.dx(), hi = p.a - p.dx();
  for (const auto& s : ledger.samples) {
    if (std::isnan(s.x_left) || std::isnan(s.x_right)) continue;
    if (s.x_left <= lo || s.x_right >= hi) {
      throw Error(Errc::BoundaryContact, "support reached the boundary at t = " + std::to_string(s.t));
    }
  }

  BlowupCertificate c;
  c.tol = tol_ineq;
  c.k1 = 2.0 * (4.0 - n);
  c.k2 = 3.0 * p.a0 * (n - 1.0) / 2.0;
  const auto& s0 = ledger.samples.front();
  c.E0 = s0.energy;
  c.V0 = s0.moment;
  const auto bt = weighted_history_series(ledger.samples, p, HistoryMode::Btilde);

  double rhs = c.V0;
  double prev_integrand = 0.0;
  bool have_violation = false;
  c.margin = -kInf;
  for (std::size_t i = 0; i < ledger.samples.size(); ++i) {
    const auto& s = ledger.samples[i];
    const double w = std::exp(-bt[i]);
    const double integrand = w * (c.k1 * c.E0 + c.k2 * s.moment_hxx);
    if (i > 0) rhs += 0.5 * (s.t - ledger.samples[i - 1].t) * (prev_integrand + integrand);
    prev_integrand = integrand;
    MomentRow row{s.t, w * s.moment, rhs, w * s.moment - rhs};
    c.margin = std::max(c.margin, row.margin);
    if (row.lhs > rhs + tol_ineq * std::abs(rhs)) have_violation = true;
    c.rows.push_back(row);
  }

  if (n <= 1.0 && c.E0 < 0.0) {
    if (n == 1.0) {
      c.T_ub = c.V0 / (6.0 * std::abs(c.E0));
    } else {
      for (std::size_t i = 1; i < c.rows.size(); ++i) {
        if (c.rows[i].rhs <= 0.0) {
          const auto& a = c.rows[i - 1];
          const auto& b = c.rows[i];
          c.T_ub = a.t + (b.t - a.t) * a.rhs / (a.rhs - b.rhs);
          break;
        }
      }
      if (!c.T_ub && prev_integrand < 0.0) {
        const auto& last = c.rows.back();
        c.T_ub = last.t + last.rhs / (-prev_integrand);
        c.T_ub_extrapolated = true;
      }
    }
  }

  for (const auto& e : ledger.events) {
    if (e.kind == "h1_cap" || e.kind == "collapse") {
      c.T_star = e.t;
      c.trigger = e.kind;
      break;
    }
  }
  if (have_violation) {
    c.verdict = Verdict::InequalityViolated;
  } else if (c.T_star) {
    c.verdict = Verdict::CertifiedConsistent;
  } else {
    c.verdict = Verdict::NoBlowup;
  }
  return c;
}

SupportEdges support_edges(const Field& h, double supp_tol) {
  const std::size_t N = h.size();
  SupportEdges e;
  std::size_t first = N, last = N;
  for (std::size_t i = 0; i < N; ++i) {
    if (h[i] > supp_tol) {
      if (first == N) first = i;
      last = i;
    }
  }
  const double dx = h.dx();
  if (first == N) {
    e.empty = true;
    e.left = e.right = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  if (first == 0 || last == N - 1) {
    e.full = true;
    e.left = h.origin();
    e.right = h.origin() + h.length();
    return e;
  }
  e.left = h.x(first - 1) + dx * (supp_tol - h[first - 1]) / (h[first] - h[first - 1]);
  e.right = h.x(last) + dx * (h[last] - supp_tol) / (h[last] - h[last + 1]);
  return e;
}

SupportTrace support_trace(const RunLedger& ledger, double r0, double center) {
  SupportTrace tr;
  tr.r0 = r0;
  double env = 0.0;
  for (const auto& s : ledger.samples) {
    if (std::isnan(s.x_left) || std::isnan(s.x_right)) continue;
    const double r = std::max(std::abs(s.x_left - center), std::abs(s.x_right - center));
    env = std::max(env, std::max(r - r0, 0.0));
    tr.times.push_back(s.t);
    tr.left_edges.push_back(s.x_left);
    tr.right_edges.push_back(s.x_right);
    tr.Gamma.push_back(env);
  }
  return tr;
}

SpreadingFit fit_spreading_exponent(const SupportTrace& trace, double t_a, double t_b, double dx) {
  std::vector<double> X, Y;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double t = trace.times[i];
    if (t < t_a || t > t_b || !(t > 0.0)) continue;
    if (!(trace.Gamma[i] > 2.0 * dx)) continue;
    X.push_back(std::log(t));
    Y.push_back(std::log(trace.Gamma[i]));
  }
  if (X.size() < 10) {
    throw Error(Errc::InsufficientSpread,
                "need 10 samples with Gamma > 2 dx in the window, found " + std::to_string(X.size()));
  }
  const double N = static_cast<double>(X.size());
  const double mx = std::accumulate(X.begin(), X.end(), 0.0) / N;
  const double my = std::accumulate(Y.begin(), Y.end(), 0.0) / N;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(Errc::InsufficientSpread, "fit window spans a single time");
  SpreadingFit f;
  f.exponent = sxy / sxx;
  const double logC = my - f.exponent * mx;
  f.C = std::exp(logC);
  double ss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double d = Y[i] - (logC + f.exponent * X[i]);
    ss += d * d;
  }
  f.residual = std::sqrt(ss / N);
  f.count = X.size();
  return f;
}

std::vector<std::vector<double>> localized_integrals(std::span<const Snapshot> snapshots, double r0,
                                                     std::span<const double> s_grid,
                                                     std::span<const double> exponents, double lift,
                                                     double center) {
  for (std::size_t i = 1; i < snapshots.size(); ++i) {
    if (snapshots[i].t < snapshots[i - 1].t) throw Error(Errc::UnorderedSamples, "snapshots out of order");
  }
  for (std::size_t i = 1; i < s_grid.size(); ++i) {
    if (s_grid[i] <= s_grid[i - 1]) throw Error(Errc::InvalidArgument, "s grid must increase");
  }
  const std::size_t ns = s_grid.size(), ne = exponents.size();
  std::vector<std::vector<double>> out(ne, std::vector<double>(ns, 0.0));
  std::vector<double> prev(ne * ns, 0.0), cur(ne * ns, 0.0);
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    const Field& h = snapshots[k].h;
    std::fill(cur.begin(), cur.end(), 0.0);
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double w = std::max(h[i] - lift, 0.0);
      if (w == 0.0) continue;
      const double dist = std::abs(h.x(i) - center);
      for (std::size_t e = 0; e < ne; ++e) {
        const double v = std::pow(w, exponents[e]) * h.dx();
        for (std::size_t j = 0; j < ns && dist >= r0 + s_grid[j]; ++j) cur[e * ns + j] += v;
      }
    }
    if (k > 0) {
      const double dt = snapshots[k].t - snapshots[k - 1].t;
      for (std::size_t e = 0; e < ne; ++e) {
        for (std::size_t j = 0; j < ns; ++j) out[e][j] += 0.5 * dt * (prev[e * ns + j] + cur[e * ns + j]);
      }
    }
    std::swap(prev, cur);
  }
  return out;
}

StampacchiaResult stampacchia_s0(const StampacchiaSystem& sys, double s1) {
  const std::size_t m = sys.c.size();
  if (m == 0 || sys.beta.size() != m || sys.alpha.size() != m || sys.G.size() != m) {
    throw Error(Errc::BadShape, "Stampacchia system needs matching nonempty c, beta, alpha, G");
  }
  if (!(sys.c_user > 1.0)) throw Error(Errc::BadShape, "the constant c must exceed 1");
  std::size_t ell = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(sys.c[i] > 0.0)) throw Error(Errc::BadShape, "c_i must be positive");
    if (!(sys.beta[i] > 1.0)) throw Error(Errc::BadShape, "beta_i must exceed 1");
    if (!(sys.alpha[i] >= 0.0)) throw Error(Errc::BadShape, "alpha_i must be nonnegative");
    if (sys.alpha[i] > 0.0) {
      if (ell != i) throw Error(Errc::BadShape, "positive alpha_i must come first");
      ++ell;
    }
  }
  double beta = 1.0;
  for (double b : sys.beta) beta *= b;
  std::vector<double> bbar(m), cb(m), over(m, 1.0), g(m);
  for (std::size_t i = 0; i < m; ++i) {
    bbar[i] = beta / sys.beta[i];
    cb[i] = std::pow(sys.c[i], bbar[i]);
    g[i] = sys.G[i](s1);
    if (!(g[i] >= 0.0)) throw Error(Errc::BadShape, "G_i must be nonnegative");
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (j != i) over[i] *= cb[j];
    }
  }
  StampacchiaResult r;
  for (std::size_t i = 0; i < m; ++i) r.G += over[i] * std::pow(g[i], bbar[i]);
  double hs = 0.0;
  for (std::size_t i = ell; i < m; ++i) {
    hs += cb[i] * std::pow(over[i], 1.0 - sys.beta[i]) * std::pow(g[i], sys.beta[i] - 1.0);
  }
  r.H = std::pow(static_cast<double>(m), beta) * hs;
  if (!(r.H < 1.0)) {
    throw Error(Errc::HypothesisFailed, "H(s1) = " + std::to_string(r.H) + " is not below 1");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < ell; ++i) {
    const double base = cb[i] * std::pow(over[i], 1.0 - sys.beta[i]) * std::pow(r.G, sys.beta[i] - 1.0);
    sum += std::pow(base, 1.0 / (sys.alpha[i] * beta));
  }
  r.s0 = s1 + sys.c_user * sum;
  return r;
}

std::function<double(double)> tabulated(std::vector<double> s, std::vector<double> values) {
  if (s.size() != values.size() || s.empty()) throw Error(Errc::BadShape, "table sizes differ or are empty");
  return [s = std::move(s), v = std::move(values)](double x) {
    if (x <= s.front()) return v.front();
    if (x >= s.back()) return v.back();
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - s.begin());
    const double w = (x - s[j - 1]) / (s[j] - s[j - 1]);
    return v[j - 1] + w * (v[j] - v[j - 1]);
  };
}

}  // namespace thinfilm
