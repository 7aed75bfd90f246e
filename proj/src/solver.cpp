#include "thinfilm/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "thinfilm/banded.hpp"
#include "thinfilm/errors.hpp"
#include "thinfilm/functionals.hpp"

namespace thinfilm {

double SolverConfig::lift() const { return std::pow(eps, theta); }

double SolverConfig::support_threshold() const { return supp_tol > 0.0 ? supp_tol : 10.0 * lift(); }

void SolverConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw Error(Errc::InvalidArgument, what);
  };
  need(eps > 0.0, "eps must be > 0");
  need(delta >= 0.0, "delta must be >= 0");
  need(theta > 0.0 && theta < 0.4, "theta must lie in (0, 2/5)");
  need(dt_init > 0.0 && dt_min > 0.0 && dt_min < dt_init, "need 0 < dt_min < dt_init");
  need(dt_max >= dt_init, "dt_max must be >= dt_init");
  need(t_end >= 0.0, "t_end must be >= 0");
  need(newton_tol > 0.0 && newton_max > 0, "Newton tolerance and iteration cap must be positive");
  need(h1_cap > 0.0, "h1_cap must be > 0");
  need(supp_tol >= 0.0, "supp_tol must be >= 0");
  need(max_rel_change > 0.0, "max_rel_change must be > 0");
  need(sample_every > 0, "sample_every must be > 0");
  need(snapshot_every >= 0, "snapshot_every must be >= 0");
  need(alpha > -0.5 && alpha < 1.0, "alpha must lie in (-1/2, 1)");
  need(eps_interp > 0.0 && eps_interp < 1.0, "eps_interp must lie in (0, 1)");
  need(segment_floor >= 0.0, "segment_floor must be >= 0");
}

namespace {

// Face coefficients at face j (between nodes j and j+1) and the resulting fluxes.
// fm is the entropy-consistent mean, dm the arithmetic one.
struct Faces {
  std::vector<double> fm, dm, flux;
  std::vector<double> fm_d0, fm_d1;  // d fm_j / d u_j, d fm_j / d u_{j+1}
};

void face_coefficients(std::span<const double> u, const ProblemParams& p, const SolverConfig& cfg, Faces& f) {
  const std::size_t N = u.size();
  const double n = p.n.value, m = p.m.value;
  std::vector<double> dn(N);
  for (std::size_t i = 0; i < N; ++i) {
    dn[i] = p.a1 != 0.0 ? pressure_coupling(u[i], n, m, cfg.eps) : 0.0;
  }
  f.fm.resize(N);
  f.dm.resize(N);
  f.fm_d0.resize(N);
  f.fm_d1.resize(N);
  for (std::size_t j = 0; j < N; ++j) {
    const std::size_t k = (j + 1) % N;
    const auto fm = face_mobility(u[j], u[k], n, cfg.eps, cfg.delta);
    f.fm[j] = fm.value;
    f.fm_d0[j] = fm.d0;
    f.fm_d1[j] = fm.d1;
    f.dm[j] = 0.5 * (dn[j] + dn[k]);
  }
}

// F_j = fm_j (a0 (u_{j+2} - 3u_{j+1} + 3u_j - u_{j-1})/dx^3 + a1 dm_j (u_{j+1} - u_j)/dx)
void fluxes(std::span<const double> u, const ProblemParams& p, double dx, Faces& f) {
  const std::size_t N = u.size();
  const double i3 = 1.0 / (dx * dx * dx), i1 = 1.0 / dx;
  f.flux.resize(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double um = u[(j + N - 1) % N], u0 = u[j], u1 = u[(j + 1) % N], u2 = u[(j + 2) % N];
    const double t3 = (u2 - 3.0 * u1 + 3.0 * u0 - um) * i3;
    const double g1 = (u1 - u0) * i1;
    f.flux[j] = f.fm[j] * (p.a0 * t3 + p.a1 * f.dm[j] * g1);
  }
}

constexpr double kT[4] = {-1.0, 3.0, -3.0, 1.0};  // d t3 / d u_{j+k}, k = -1..2
constexpr double kG[4] = {0.0, -1.0, 1.0, 0.0};   // d g1 / d u_{j+k}

// Adds c (dF_i - dF_{i-1}) given per-face derivative rows dF[j][k+1] = dF_j/du_{j+k}.
void add_divergence(CyclicPentadiagonal& A, const std::vector<std::array<double, 4>>& dF, double c) {
  const std::size_t N = A.size();
  for (std::size_t i = 0; i < N; ++i) {
    const auto& fi = dF[i];
    const auto& fl = dF[(i + N - 1) % N];
    for (int k = -1; k <= 2; ++k) A.at(i, k) += c * fi[static_cast<std::size_t>(k + 1)];
    for (int k = -1; k <= 2; ++k) A.at(i, k - 1) -= c * fl[static_cast<std::size_t>(k + 1)];
  }
}

double max_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

struct Attempt {
  StepReport report;
  std::vector<double> u;
  double dissipation = 0.0;
};

Attempt attempt_step(const Field& h, const ProblemParams& p, const SolverConfig& cfg, double dt) {
  const std::size_t N = h.size();
  const double dx = h.dx();
  const double c = dt / dx;
  const double i3 = 1.0 / (dx * dx * dx), i1 = 1.0 / dx;
  const auto hv = h.values();
  const double scale = std::max(1.0, max_abs(hv));
  Attempt at;
  at.report.dt = dt;
  CyclicPentadiagonal A(N);
  std::vector<std::array<double, 4>> dF(N);
  Faces faces;

  if (cfg.mode == StepMode::LinearlyImplicit) {
    face_coefficients(hv, p, cfg, faces);
    for (std::size_t j = 0; j < N; ++j) {
      for (std::size_t k = 0; k < 4; ++k) {
        dF[j][k] = faces.fm[j] * (p.a0 * kT[k] * i3 + p.a1 * faces.dm[j] * kG[k] * i1);
      }
    }
    A.clear();
    for (std::size_t i = 0; i < N; ++i) A.at(i, 0) = 1.0;
    add_divergence(A, dF, c);
    // increment form: constants give a zero right-hand side and stay exact
    fluxes(hv, p, dx, faces);
    std::vector<double> rhs(N), du;
    for (std::size_t i = 0; i < N; ++i) rhs[i] = -c * (faces.flux[i] - faces.flux[(i + N - 1) % N]);
    try {
      du = A.solve(rhs);
    } catch (const Error&) {
      at.report.reason = "linear solve failed";
      return at;
    }
    std::vector<double> r(N);
    A.multiply(du, r);
    for (std::size_t i = 0; i < N; ++i) r[i] -= rhs[i];
    at.u.resize(N);
    for (std::size_t i = 0; i < N; ++i) at.u[i] = hv[i] + du[i];
    at.report.residual = max_abs(r) / scale;
    at.report.iterations = 1;
  } else {
    at.u.assign(hv.begin(), hv.end());
    std::vector<double> R(N);
    const double n = p.n.value, m = p.m.value;
    std::vector<double> dp(N);
    bool converged = false;
    for (int it = 0; it < cfg.newton_max; ++it) {
      face_coefficients(at.u, p, cfg, faces);
      fluxes(at.u, p, dx, faces);
      for (std::size_t i = 0; i < N; ++i) {
        R[i] = at.u[i] - hv[i] + c * (faces.flux[i] - faces.flux[(i + N - 1) % N]);
      }
      at.report.residual = max_abs(R) / scale;
      at.report.iterations = it;
      if (at.report.residual < cfg.newton_tol) {
        converged = true;
        break;
      }
      for (std::size_t i = 0; i < N; ++i) {
        dp[i] = p.a1 != 0.0 ? pressure_coupling_derivative(at.u[i], n, m, cfg.eps) : 0.0;
      }
      for (std::size_t j = 0; j < N; ++j) {
        const std::size_t j1 = (j + 1) % N;
        const double um = at.u[(j + N - 1) % N], u0 = at.u[j], u1 = at.u[j1], u2 = at.u[(j + 2) % N];
        const double t3 = (u2 - 3.0 * u1 + 3.0 * u0 - um) * i3;
        const double g1 = (u1 - u0) * i1;
        const double q = p.a0 * t3 + p.a1 * faces.dm[j] * g1;
        for (std::size_t k = 0; k < 4; ++k) {
          dF[j][k] = faces.fm[j] * (p.a0 * kT[k] * i3 + p.a1 * faces.dm[j] * kG[k] * i1);
        }
        // coefficient derivatives act on u_j (k = 0) and u_{j+1} (k = 1)
        dF[j][1] += faces.fm_d0[j] * q + faces.fm[j] * p.a1 * g1 * 0.5 * dp[j];
        dF[j][2] += faces.fm_d1[j] * q + faces.fm[j] * p.a1 * g1 * 0.5 * dp[j1];
      }
      A.clear();
      for (std::size_t i = 0; i < N; ++i) A.at(i, 0) = 1.0;
      add_divergence(A, dF, c);
      std::vector<double> du;
      try {
        for (auto& v : R) v = -v;
        du = A.solve(R);
      } catch (const Error&) {
        at.report.reason = "linear solve failed";
        return at;
      }
      for (std::size_t i = 0; i < N; ++i) at.u[i] += du[i];
      double umin = at.u[0];
      for (double v : at.u) umin = std::min(umin, v);
      if (!(umin > 0.0)) {
        at.report.reason = "nonpositive Newton iterate";
        return at;
      }
    }
    if (!converged) {
      at.report.reason = "Newton did not converge";
      return at;
    }
  }

  if (at.report.residual >= cfg.newton_tol) {
    at.report.reason = "residual above tolerance";
    return at;
  }
  double umin = at.u[0], change = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    umin = std::min(umin, at.u[i]);
    change = std::max(change, std::abs(at.u[i] - hv[i]));
    if (!std::isfinite(at.u[i])) {
      at.report.reason = "non-finite state";
      return at;
    }
  }
  if (!(umin > 0.0)) {
    at.report.reason = "positivity";
    return at;
  }
  if (change > cfg.max_rel_change * max_abs(hv)) {
    at.report.reason = "change limiter";
    return at;
  }
  // in linearly implicit mode the faces still hold the lagged coefficients
  fluxes(at.u, p, dx, faces);
  double d = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    if (faces.fm[j] > 0.0) d += faces.flux[j] * faces.flux[j] / faces.fm[j];
  }
  at.dissipation = dt * d * dx;
  at.report.accepted = true;
  return at;
}

void accept(RunState& s, Attempt&& at) {
  s.h = Field(std::move(at.u), s.h.dx(), s.h.origin());
  s.t += at.report.dt;
  s.dissipation += at.dissipation;
  ++s.step_count;
  ++s.ledger.accepted_steps;
}

// Discrete Fourier low-pass keeping |k| <= N/3.
std::vector<double> low_pass(std::span<const double> v) {
  const std::size_t N = v.size();
  const std::size_t kc = N / 3;
  std::vector<std::complex<double>> coef(kc + 1);
  for (std::size_t k = 0; k <= kc; ++k) {
    std::complex<double> s = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * j % N) / static_cast<double>(N);
      s += v[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    coef[k] = s / static_cast<double>(N);
  }
  std::vector<double> out(N);
  for (std::size_t j = 0; j < N; ++j) {
    double s = coef[0].real();
    for (std::size_t k = 1; k <= kc; ++k) {
      if (2 * k == N) continue;
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(k * j % N) / static_cast<double>(N);
      s += 2.0 * (coef[k] * std::complex<double>(std::cos(ang), std::sin(ang))).real();
    }
    out[j] = s;
  }
  return out;
}

}  // namespace

Field lift_initial_data(const Field& h0, const SolverConfig& cfg) {
  if (!(h0.mass() > 0.0)) throw Error(Errc::EmptyData, "initial data has zero mass");
  for (double v : h0.values()) {
    if (v < 0.0) throw Error(Errc::NonpositiveField, "initial data must be nonnegative");
  }
  std::vector<double> v(h0.values().begin(), h0.values().end());
  if (cfg.smooth_initial) {
    v = low_pass(v);
    // filtering can undershoot near kinks; clip to keep the lift as floor
    for (auto& x : v) x = std::max(x, 0.0);
  }
  const double lift = cfg.lift();
  for (auto& x : v) x += lift;
  return Field(std::move(v), h0.dx(), h0.origin());
}

FunctionalSample sample_state(const Field& h, double t, const ProblemParams& p, const SolverConfig& cfg,
                              double lift, double dissipation) {
  FunctionalSample s;
  s.t = t;
  s.mass = h.mass();
  s.energy = energy(h, p);
  s.entropy = entropy_value(h, make_entropy_spec(p.n.value));
  s.alpha_entropy = entropy_value(h, make_entropy_spec(p.n.value, cfg.alpha));
  s.hx_sq = hx_sq(h);
  s.sup = h.max();
  const double n = p.n.value;
  if (n > 0.0 && n < 2.0) {
    std::vector<double> w(h.size());
    // n = 1 is linear in h, so the lift shifts the moment by a constant
    for (std::size_t i = 0; i < h.size(); ++i) w[i] = n == 1.0 ? h[i] - lift : std::max(h[i] - lift, 0.0);
    if (n == 1.0) {
      const double c = h.origin() + 0.5 * h.length();
      double acc = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) acc += (h.x(i) - c) * (h.x(i) - c) * w[i];
      s.moment = acc * h.dx();
    } else {
      s.moment = second_moment_entropy(Field(std::move(w), h.dx(), h.origin()), n);
    }
  } else {
    s.moment = std::numeric_limits<double>::quiet_NaN();
  }
  const auto e = support_edges(h, cfg.support_threshold());
  s.x_left = e.left;
  s.x_right = e.right;
  s.energy_eps = regularized_energy(h, p, cfg.eps);
  s.dissipation = dissipation;
  s.moment_hxx = moment_hxx(h);
  s.h1 = h1_norm(h);
  return s;
}

RunState make_state(Field h, const ProblemParams& p, const SolverConfig& cfg, double lift) {
  p.validate();
  cfg.validate();
  if (static_cast<int>(h.size()) != p.nx) throw Error(Errc::InvalidArgument, "field size differs from nx");
  RunState s;
  s.h = std::move(h);
  s.dt = cfg.dt_init;
  s.ledger.lift = lift;
  s.ledger.push(sample_state(s.h, 0.0, p, cfg, lift, 0.0));
  if (cfg.snapshot_every > 0) s.ledger.snapshots.push_back({0.0, s.h});
  return s;
}

StepReport implicit_step(RunState& state, const ProblemParams& p, const SolverConfig& cfg) {
  Attempt at = attempt_step(state.h, p, cfg, state.dt);
  StepReport rep = at.report;
  if (rep.accepted) {
    accept(state, std::move(at));
    return rep;
  }
  ++state.ledger.rejected_steps;
  state.dt *= 0.5;
  if (state.dt < cfg.dt_min) {
    throw Error(Errc::StepCollapse, "time step fell below dt_min (" + rep.reason + ")");
  }
  return rep;
}

StopReason run_until(RunState& s, const ProblemParams& p, const SolverConfig& cfg, double t_stop,
                     double h1_cap) {
  auto take_sample = [&] { s.ledger.push(sample_state(s.h, s.t, p, cfg, s.ledger.lift, s.dissipation)); };
  std::size_t since_sample = 0;
  while (s.t < t_stop && t_stop - s.t > 1e-13 * std::max(1.0, t_stop)) {
    const double dt = std::min(s.dt, t_stop - s.t);
    const bool clipped = dt < s.dt;
    Attempt at = attempt_step(s.h, p, cfg, dt);
    if (!at.report.accepted) {
      ++s.ledger.rejected_steps;
      s.consecutive_accepts = 0;
      s.dt = 0.5 * dt;
      if (s.ledger.events.size() < 10000) s.ledger.events.push_back({s.t, "reject", at.report.reason});
      if (s.dt < cfg.dt_min) {
        s.ledger.collapsed = true;
        s.ledger.events.push_back({s.t, "collapse", "dt below dt_min after: " + at.report.reason});
        take_sample();
        return StopReason::Collapse;
      }
      continue;
    }
    accept(s, std::move(at));
    if (!clipped && ++s.consecutive_accepts >= 5) {
      s.dt = std::min(1.2 * s.dt, cfg.dt_max);
      s.consecutive_accepts = 0;
    }
    if (cfg.snapshot_every > 0 && s.step_count % static_cast<std::size_t>(cfg.snapshot_every) == 0) {
      s.ledger.snapshots.push_back({s.t, s.h});
    }
    if (++since_sample >= static_cast<std::size_t>(cfg.sample_every)) {
      take_sample();
      since_sample = 0;
    }
    if (std::isfinite(h1_cap) && h1_norm(s.h) > h1_cap) {
      take_sample();
      s.ledger.events.push_back({s.t, "h1_cap", "H1 norm exceeded " + std::to_string(h1_cap)});
      return StopReason::H1Cap;
    }
  }
  take_sample();
  return StopReason::Reached;
}

RunState run_segment(const Field& h0, const ProblemParams& p, const SolverConfig& cfg, double t_span,
                     double lift) {
  if (!(t_span >= 0.0)) throw Error(Errc::InvalidArgument, "time span must be >= 0");
  RunState s = make_state(h0, p, cfg, lift);
  run_until(s, p, cfg, t_span, cfg.h1_cap);
  s.ledger.refresh_history(p);
  return s;
}

RunLedger continue_global(const Field& h0, const ProblemParams& p, const SolverConfig& cfg, double t_goal) {
  const Regime regime = classify_regime(p);
  if (regime == Regime::Supercritical) {
    throw Error(Errc::RegionError, "global continuation needs m <= n + 2");
  }
  if (regime == Regime::Critical && p.a1 > 0.0) {
    const double Mc = critical_mass(p, cfg.eps_interp);
    if (!(h0.mass() < Mc)) {
      throw Error(Errc::RegionError, "critical regime needs mass below M_c = " + std::to_string(Mc));
    }
  }
  const Field lifted = lift_initial_data(h0, cfg);
  RunState s = make_state(lifted, p, cfg, cfg.lift());
  if (cfg.smooth_initial) s.ledger.events.push_back({0.0, "smoothing", "low-pass filter applied to h0"});
  const double mass = lifted.mass();
  while (s.t < t_goal && !s.ledger.collapsed) {
    const auto& cur = s.ledger.samples.back();
    const auto k = constants_chain(p, cfg, mass, cur.entropy, cur.hx_sq);
    const double tl = tloc_estimate(k, cur.hx_sq, cur.entropy);
    // at least one current step per segment so tiny local-time estimates still advance
    double len = std::max({tl, cfg.segment_floor, s.dt});
    if (!std::isfinite(len) || len <= 0.0) len = t_goal - s.t;
    len = std::min(len, t_goal - s.t);
    s.ledger.segments.push_back({s.t, tl, len});
    if (run_until(s, p, cfg, s.t + len, std::numeric_limits<double>::infinity()) == StopReason::Collapse) break;
  }
  s.ledger.refresh_history(p);
  return std::move(s.ledger);
}

std::string_view to_string(BlowupOutcome o) noexcept {
  switch (o) {
    case BlowupOutcome::H1Cap: return "H1Cap";
    case BlowupOutcome::StepCollapse: return "StepCollapse";
    case BlowupOutcome::NoBlowupWithinHorizon: return "NoBlowupWithinHorizon";
    case BlowupOutcome::DomainTooSmall: return "DomainTooSmall";
  }
  return "Unknown";
}

BlowupRun continue_to_blowup(const Field& h0, const ProblemParams& p, const SolverConfig& cfg, double horizon,
                             double tol_ineq, bool force) {
  if (!force && !theorem_applicability(p).blowup_ok) {
    throw Error(Errc::RegionError, "(n, m) lies outside the blow-up region");
  }
  const double E0 = energy(h0, p);
  if (!(E0 < 0.0)) throw Error(Errc::NotNegativeEnergy, "initial energy " + std::to_string(E0) + " is not negative");
  const auto supp = support_edges(h0, 0.0);
  const double margin = 0.2 * p.length();
  if (supp.full || supp.left < -p.a + margin || supp.right > p.a - margin) {
    throw Error(Errc::DomainTooSmall, "initial support must keep 20% of the period clear of the boundary");
  }

  const Field lifted = lift_initial_data(h0, cfg);
  RunState s = make_state(lifted, p, cfg, cfg.lift());
  if (cfg.smooth_initial) s.ledger.events.push_back({0.0, "smoothing", "low-pass filter applied to h0"});
  BlowupRun run;
  run.h1_initial = h1_norm(lifted);
  run.h1_cap = std::isfinite(cfg.h1_cap) ? cfg.h1_cap : 1e3 * run.h1_initial;
  const double mass = lifted.mass();
  const double lo = -p.a + p.dx(), hi = p.a - p.dx();

  run.outcome = BlowupOutcome::NoBlowupWithinHorizon;
  while (s.t < horizon) {
    const auto& cur = s.ledger.samples.back();
    const auto k = constants_chain(p, cfg, mass, cur.entropy, cur.hx_sq);
    const double tl = tloc_estimate(k, cur.hx_sq, cur.entropy);
    // at least one current step per segment so tiny local-time estimates still advance
    double len = std::max({tl, cfg.segment_floor, s.dt});
    if (!std::isfinite(len) || len <= 0.0) len = horizon - s.t;
    len = std::min(len, horizon - s.t);
    s.ledger.segments.push_back({s.t, tl, len});
    const auto stop = run_until(s, p, cfg, s.t + len, run.h1_cap);
    const auto& last = s.ledger.samples.back();
    if (!std::isnan(last.x_left) && (last.x_left <= lo || last.x_right >= hi)) {
      s.ledger.events.push_back({s.t, "contact", "support reached the boundary"});
      run.outcome = BlowupOutcome::DomainTooSmall;
      break;
    }
    if (stop == StopReason::H1Cap) {
      run.outcome = BlowupOutcome::H1Cap;
      break;
    }
    if (stop == StopReason::Collapse) {
      run.outcome = BlowupOutcome::StepCollapse;
      break;
    }
  }
  s.ledger.refresh_history(p);
  run.final_state = s.h;
  run.ledger = std::move(s.ledger);
  if (run.outcome != BlowupOutcome::DomainTooSmall) {
    try {
      run.certificate = moment_certificate(run.ledger, p, tol_ineq);
    } catch (const Error& e) {
      if (e.code() != Errc::BoundaryContact) throw;
      run.outcome = BlowupOutcome::DomainTooSmall;
    }
  }
  return run;
}

}  // namespace thinfilm
