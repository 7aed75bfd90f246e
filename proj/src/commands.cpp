#include "thinfilm/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include "thinfilm/functionals.hpp"
#include "thinfilm/io.hpp"
#include "thinfilm/solver.hpp"

namespace thinfilm {

namespace fs = std::filesystem;

int exit_status_for(const Error& e) noexcept {
  switch (e.code()) {
    case Errc::ConfigError: return kExitConfig;
    case Errc::StepCollapse: return kExitCollapse;
    default: return kExitFailure;
  }
}

std::size_t worker_count() {
  if (const char* env = std::getenv("THINFILM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

// ---- dispersion -----------------------------------------------------------------

DispersionRow measure_growth(const ProblemParams& p, const SolverConfig& cfg, const DispersionOptions& opt,
                             int k) {
  const std::size_t N = static_cast<std::size_t>(p.nx);
  const double xi = k * std::numbers::pi / p.a;
  const double amp = opt.amplitude > 0.0 ? opt.amplitude : 1e-6 * opt.hbar;
  std::vector<double> v(N);
  std::vector<double> c(N), s(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double x = -p.a + static_cast<double>(i) * p.dx();
    c[i] = std::cos(xi * x);
    s[i] = std::sin(xi * x);
    v[i] = opt.hbar + amp * c[i];
  }
  DispersionRow row;
  row.k = k;
  row.xi = xi;
  row.sigma_formula = growth_rate(xi, opt.hbar, p);

  // the flat state is positive already, so no lift is added
  RunState state = make_state(Field(std::move(v), p.dx(), -p.a), p, cfg, 0.0);
  const double rate = std::abs(row.sigma_formula);
  const double duration = rate > 0.0 ? std::min(opt.t_max, 3.0 / rate) : opt.t_max;
  const double dt = rate > 0.0 ? std::min(opt.dt, 0.005 / rate) : opt.dt;

  auto log_amplitude = [&](const Field& h) {
    double mean = 0.0;
    for (std::size_t i = 0; i < N; ++i) mean += h[i];
    mean /= static_cast<double>(N);
    double pc = 0.0, ps = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      pc += (h[i] - mean) * c[i];
      ps += (h[i] - mean) * s[i];
    }
    return std::log(2.0 / static_cast<double>(N) * std::hypot(pc, ps));
  };

  std::vector<double> T{0.0}, Y{log_amplitude(state.h)};
  while (state.t < duration * (1.0 - 1e-12)) {
    state.dt = std::min(dt, duration - state.t);
    const auto rep = implicit_step(state, p, cfg);
    if (!rep.accepted) continue;
    T.push_back(state.t);
    Y.push_back(log_amplitude(state.h));
  }
  const double n = static_cast<double>(T.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < T.size(); ++i) {
    mt += T[i];
    my += Y[i];
  }
  mt /= n;
  my /= n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < T.size(); ++i) {
    stt += (T[i] - mt) * (T[i] - mt);
    sty += (T[i] - mt) * (Y[i] - my);
  }
  row.sigma_measured = sty / stt;
  double ss = 0.0;
  for (std::size_t i = 0; i < T.size(); ++i) {
    const double d = Y[i] - (my + row.sigma_measured * (T[i] - mt));
    ss += d * d;
  }
  row.fit_residual = std::sqrt(ss / n);
  if (!(row.fit_residual <= opt.fit_tol)) {
    throw Error(Errc::FitFailure, "log-amplitude fit for k = " + std::to_string(k) + " has rms " +
                                      std::to_string(row.fit_residual));
  }
  row.abs_err = std::abs(row.sigma_measured - row.sigma_formula);
  row.rel_err = row.sigma_formula != 0.0 ? row.abs_err / std::abs(row.sigma_formula)
                                         : std::numeric_limits<double>::infinity();
  return row;
}

std::vector<DispersionRow> dispersion_table(const ExperimentConfig& cfg) {
  const auto& p = cfg.problem;
  int k_max = cfg.dispersion.k_max;
  if (k_max == 0) {
    const double edge = band_edge(cfg.dispersion.hbar, p);
    k_max = edge > 0.0 ? std::max(1, static_cast<int>(std::floor(2.0 * edge * p.a / std::numbers::pi))) : 4;
  }
  k_max = std::min(k_max, p.nx / 4);
  std::vector<DispersionRow> rows(static_cast<std::size_t>(std::max(k_max, 0)));
  parallel_for(rows.size(), [&](std::size_t i) {
    rows[i] = measure_growth(p, cfg.solver, cfg.dispersion, static_cast<int>(i) + 1);
  });
  return rows;
}

// ---- regime map -------------------------------------------------------------------

namespace {

std::vector<Exponent> axis(const Exponent& lo, const Exponent& hi, const Exponent& step) {
  std::vector<Exponent> out;
  if (lo.exact && hi.exact && step.exact) {
    std::optional<Rational> v = *lo.exact;
    while (v && compare(*v, *hi.exact) <= 0) {
      out.emplace_back(*v);
      v = add(*v, *step.exact);
    }
    return out;
  }
  const double slack = 1e-12 * std::abs(step.value);
  for (std::size_t i = 0;; ++i) {
    const double v = lo.value + static_cast<double>(i) * step.value;
    if (v > hi.value + slack) break;
    out.emplace_back(v);
  }
  return out;
}

}  // namespace

std::vector<RegimeRow> regime_map(const ExperimentConfig& cfg) {
  const auto& r = cfg.regime;
  if (!(r.n_step.value > 0.0) || !(r.m_step.value > 0.0)) {
    throw Error(Errc::ConfigError, "regime steps must be > 0");
  }
  const auto ns = axis(r.n_min, r.n_max, r.n_step);
  const auto ms = axis(r.m_min, r.m_max, r.m_step);
  std::vector<RegimeRow> rows(ns.size() * ms.size());
  parallel_for(rows.size(), [&](std::size_t idx) {
    ProblemParams p = cfg.problem;
    p.n = ns[idx / ms.size()];
    p.m = ms[idx % ms.size()];
    rows[idx] = RegimeRow{p.n, p.m, regime_report(p, 1.0, cfg.solver.eps_interp)};
  });
  return rows;
}

std::string regime_csv(const std::vector<RegimeRow>& rows) {
  std::string out = "n,m,regime,existence_ok,fsp_ok,blowup_ok\n";
  auto b = [](bool v) { return v ? "true" : "false"; };
  for (const auto& row : rows) {
    out += format_double(row.n.value) + ',' + format_double(row.m.value) + ',' +
           std::string(to_string(row.report.regime)) + ',' + b(row.report.existence_ok) + ',' +
           b(row.report.fsp_ok) + ',' + b(row.report.blowup_ok) + '\n';
  }
  return out;
}

// ---- spreading ----------------------------------------------------------------------

SpreadingResult spreading_experiment(const ExperimentConfig& cfg) {
  const auto& p = cfg.problem;
  const Field h0 = initial_field(cfg);
  SpreadingResult res;
  double mx = 0.0;
  for (std::size_t i = 0; i < h0.size(); ++i) mx += h0.x(i) * h0[i];
  res.center = mx / (h0.mass() / h0.dx());
  res.target = 1.0 / (p.n.value + 4.0);
  const Field lifted = lift_initial_data(h0, cfg.solver);
  RunState state = run_segment(lifted, p, cfg.solver, cfg.solver.t_end, cfg.solver.lift());
  res.ledger = std::move(state.ledger);
  const auto e0 = support_edges(h0, 0.0);
  const double r0 = std::max(std::abs(e0.left - res.center), std::abs(e0.right - res.center));
  res.trace = support_trace(res.ledger, r0, res.center);
  const auto& sp = cfg.spreading;
  if (sp.t_b > sp.t_a) {
    res.t_a = sp.t_a;
    res.t_b = sp.t_b;
  } else {
    const double r_start = sp.r_start * p.a;
    const auto& tr = res.trace;
    std::size_t i = 0;
    while (i < tr.times.size() && tr.Gamma[i] + tr.r0 < r_start) ++i;
    if (i == tr.times.size() || !(tr.times[i] > 0.0)) {
      throw Error(Errc::InsufficientSpread, "support never reached r = " + std::to_string(r_start));
    }
    res.t_a = tr.times[i];
    res.t_b = res.t_a * std::pow(10.0, sp.decades);
    if (tr.times.back() < res.t_b) {
      throw Error(Errc::InsufficientSpread, "run ends at t = " + std::to_string(tr.times.back()) +
                                                " before the fit window closes at " + std::to_string(res.t_b));
    }
  }
  res.fit = fit_spreading_exponent(res.trace, res.t_a, res.t_b, p.dx());
  return res;
}

// ---- subcommands ---------------------------------------------------------------------

namespace {

struct Prepared {
  ExperimentConfig cfg;
  fs::path out;
};

Prepared prepare(const ExperimentConfig& cfg, const CommandOptions& opt) {
  Prepared pr{cfg, fs::path(cfg.output_dir)};
  if (opt.out_dir) pr.out = *opt.out_dir;
  if (opt.seed) pr.cfg.seed = *opt.seed;
  fs::create_directories(pr.out);
  return pr;
}

json problem_json(const ProblemParams& p) {
  return json{{"n", number(p.n.value)}, {"m", number(p.m.value)}, {"a0", number(p.a0)},
              {"a1", number(p.a1)},     {"a", number(p.a)},       {"nx", p.nx}};
}

json solver_json(const SolverConfig& s) {
  return json{{"eps", number(s.eps)},
              {"delta", number(s.delta)},
              {"theta", number(s.theta)},
              {"lift", number(s.lift())},
              {"dt_init", number(s.dt_init)},
              {"dt_min", number(s.dt_min)},
              {"dt_max", number(s.dt_max)},
              {"t_end", number(s.t_end)},
              {"newton_tol", number(s.newton_tol)},
              {"newton_max", s.newton_max},
              {"h1_cap", number(s.h1_cap)},
              {"supp_tol", number(s.support_threshold())},
              {"max_rel_change", number(s.max_rel_change)},
              {"mode", s.mode == StepMode::Newton ? "newton" : "linear"},
              {"sample_every", s.sample_every},
              {"snapshot_every", s.snapshot_every},
              {"alpha", number(s.alpha)},
              {"eps_interp", number(s.eps_interp)},
              {"segment_floor", number(s.segment_floor)},
              {"smooth_initial", s.smooth_initial}};
}

json ledger_meta(const RunLedger& l) {
  return json{{"samples", l.samples.size()},
              {"accepted_steps", l.accepted_steps},
              {"rejected_steps", l.rejected_steps},
              {"collapsed", l.collapsed},
              {"lift", number(l.lift)}};
}

// Reject events can number in the thousands; the report keeps the rest.
json notable_events(const RunLedger& l) {
  json out = json::array();
  std::size_t rejects = 0;
  for (const auto& e : l.events) {
    if (e.kind == "reject") {
      ++rejects;
      continue;
    }
    out.push_back(e);
  }
  return json{{"rejections", rejects}, {"other", std::move(out)}};
}

void write_json(const fs::path& path, const json& j) { atomic_write(path, j.dump(2) + "\n"); }

void write_snapshots(const fs::path& dir, const RunLedger& l, const ProblemParams& p) {
  for (std::size_t i = 0; i < l.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%05zu.txt", i);
    atomic_write(dir / "snapshots" / name, snapshot_text(l.snapshots[i], p));
  }
}

double mass_drift(const RunLedger& l) {
  if (l.samples.empty()) return 0.0;
  const double m0 = l.samples.front().mass;
  double d = 0.0;
  for (const auto& s : l.samples) d = std::max(d, std::abs(s.mass - m0) / m0);
  return d;
}

}  // namespace

int cmd_simulate(const ExperimentConfig& config, const CommandOptions& opt, std::ostream& log) {
  const auto [cfg, out] = prepare(config, opt);
  const auto& p = cfg.problem;
  const Field h0 = initial_field(cfg);
  RunLedger ledger;
  std::optional<Field> final_state;
  if (cfg.simulate.global) {
    ledger = continue_global(h0, p, cfg.solver, cfg.solver.t_end);
  } else {
    const Field lifted = lift_initial_data(h0, cfg.solver);
    RunState st = run_segment(lifted, p, cfg.solver, cfg.solver.t_end, cfg.solver.lift());
    if (cfg.solver.smooth_initial) st.ledger.events.push_back({0.0, "smoothing", "low-pass filter applied to h0"});
    final_state = st.h;
    ledger = std::move(st.ledger);
  }
  const auto& s0 = ledger.samples.front();
  const auto constants = constants_chain(p, cfg.solver, s0.mass, s0.entropy, s0.hx_sq, s0.energy);
  const auto weighted = check_exp_weighted_bounds(ledger, p, cfg.simulate.slack);

  json report;
  report["command"] = "simulate";
  report["problem"] = problem_json(p);
  report["solver"] = solver_json(cfg.solver);
  report["seed"] = cfg.seed;
  report["regime"] = regime_report(p, 1.0, cfg.solver.eps_interp);
  report["constants"] = constants;
  report["weighted_bounds"] = weighted;
  report["mass_drift"] = number(mass_drift(ledger));
  report["ledger"] = ledger_meta(ledger);
  report["events"] = notable_events(ledger);
  json segs = json::array();
  for (const auto& sg : ledger.segments) segs.push_back(sg);
  report["segments"] = std::move(segs);
  if (cfg.initial.kind == InitialKind::Constant) {
    const double c = cfg.initial.C + cfg.solver.lift();
    double drift = 0.0;
    if (final_state) {
      for (double v : final_state->values()) drift = std::max(drift, std::abs(v - c));
    } else {
      for (const auto& s : ledger.samples) drift = std::max(drift, std::abs(s.sup - c));
    }
    const bool small_domain = p.a1 == 0.0 || p.length() * p.length() < p.a0 / p.a1;
    report["constancy"] = json{{"applicable", small_domain},
                               {"max_drift", number(drift)},
                               {"verdict", drift < 1e-12 ? "PASS" : "FAIL"}};
  }

  std::vector<std::vector<double>> wrows;
  for (const auto& r : weighted.rows) wrows.push_back({r.t, r.lhs1, r.rhs1, r.lhs2, r.rhs2});
  atomic_write(out / "ledger.csv", ledger_csv(ledger));
  atomic_write(out / "weighted_bounds.csv", numeric_csv("t,lhs1,rhs1,lhs2,rhs2", wrows));
  write_snapshots(out, ledger, p);

  int status = kExitOk;
  if (ledger.collapsed) {
    status = kExitCollapse;
    log << "simulate: step size collapsed at t = " << ledger.samples.back().t << "\n";
  } else if (!weighted.ok && cfg.simulate.strict) {
    status = kExitViolation;
    log << "simulate: weighted bound violated beyond slack " << cfg.simulate.slack << "\n";
  }
  report["exit_status"] = status;
  write_json(out / "report.json", report);
  log << "simulate: " << ledger.samples.size() << " samples, mass drift " << mass_drift(ledger) << "\n";
  return status;
}

int cmd_dispersion(const ExperimentConfig& config, const CommandOptions& opt, std::ostream& log) {
  const auto [cfg, out] = prepare(config, opt);
  const auto rows = dispersion_table(cfg);
  std::vector<std::vector<double>> csv;
  json jr = json::array();
  for (const auto& r : rows) {
    csv.push_back({static_cast<double>(r.k), r.xi, r.sigma_measured, r.sigma_formula, r.abs_err, r.rel_err,
                   r.fit_residual});
    jr.push_back(json{{"k", r.k},
                      {"xi", number(r.xi)},
                      {"sigma_measured", number(r.sigma_measured)},
                      {"sigma_formula", number(r.sigma_formula)},
                      {"abs_err", number(r.abs_err)},
                      {"rel_err", number(r.rel_err)},
                      {"fit_residual", number(r.fit_residual)}});
  }
  atomic_write(out / "dispersion.csv",
               numeric_csv("k,xi,sigma_measured,sigma_formula,abs_err,rel_err,fit_residual", csv));
  json report{{"command", "dispersion"},
              {"problem", problem_json(cfg.problem)},
              {"hbar", number(cfg.dispersion.hbar)},
              {"band_edge", number(band_edge(cfg.dispersion.hbar, cfg.problem))},
              {"rows", std::move(jr)},
              {"exit_status", kExitOk}};
  write_json(out / "report.json", report);
  log << "dispersion: " << rows.size() << " modes\n";
  return kExitOk;
}

int cmd_certify_blowup(const ExperimentConfig& config, const CommandOptions& opt, std::ostream& log) {
  const auto [cfg, out] = prepare(config, opt);
  const auto& p = cfg.problem;
  const Field h0 = initial_field(cfg);
  const double E0 = energy(h0, p);
  if (!(E0 < 0.0)) throw Error(Errc::NotNegativeEnergy, "initial energy " + std::to_string(E0) + " is not negative");
  double V0 = 0.0;
  for (std::size_t i = 0; i < h0.size(); ++i) V0 += h0.x(i) * h0.x(i) * h0[i];
  V0 *= h0.dx();
  double horizon = cfg.blowup.horizon;
  std::optional<double> t_ub;
  if (p.n.value == 1.0 && E0 < 0.0) t_ub = V0 / (6.0 * std::abs(E0));
  if (horizon <= 0.0) {
    if (!t_ub) throw Error(Errc::ConfigError, "blowup.horizon is required unless n = 1 with negative energy");
    horizon = cfg.blowup.horizon_factor * *t_ub;
  }
  const auto run = continue_to_blowup(h0, p, cfg.solver, horizon, cfg.blowup.tol, opt.force);

  json report;
  report["command"] = "certify-blowup";
  report["problem"] = problem_json(p);
  report["solver"] = solver_json(cfg.solver);
  report["regime"] = regime_report(p, 1.0, cfg.solver.eps_interp);
  report["theorem_backed"] = theorem_applicability(p).blowup_ok;
  report["initial"] = json{{"energy", number(E0)},
                           {"moment", number(V0)},
                           {"T_ub", t_ub ? number(*t_ub) : json(nullptr)},
                           {"horizon", number(horizon)}};
  report["outcome"] = std::string(to_string(run.outcome));
  report["h1_initial"] = number(run.h1_initial);
  report["h1_cap"] = number(run.h1_cap);
  report["h1_final"] = number(h1_norm(run.final_state));
  report["certificate"] = run.certificate ? json(*run.certificate) : json(nullptr);
  report["ledger"] = ledger_meta(run.ledger);
  report["events"] = notable_events(run.ledger);
  json segs = json::array();
  for (const auto& sg : run.ledger.segments) segs.push_back(sg);
  report["segments"] = std::move(segs);

  atomic_write(out / "ledger.csv", ledger_csv(run.ledger));
  if (run.certificate) {
    std::vector<std::vector<double>> rows;
    for (const auto& r : run.certificate->rows) rows.push_back({r.t, r.lhs, r.rhs, r.margin});
    atomic_write(out / "moment.csv", numeric_csv("t,LHS,RHS,margin", rows));
  }
  write_snapshots(out, run.ledger, p);

  int status = kExitOk;
  if (run.certificate && run.certificate->verdict == Verdict::InequalityViolated) {
    status = kExitViolation;
  } else if (run.outcome == BlowupOutcome::DomainTooSmall || run.outcome == BlowupOutcome::NoBlowupWithinHorizon) {
    status = kExitFailure;
  }
  report["exit_status"] = status;
  write_json(out / "report.json", report);
  log << "certify-blowup: " << to_string(run.outcome);
  if (run.certificate) log << ", verdict " << to_string(run.certificate->verdict);
  log << "\n";
  return status;
}

int cmd_spreading(const ExperimentConfig& config, const CommandOptions& opt, std::ostream& log) {
  const auto [cfg, out] = prepare(config, opt);
  if (cfg.problem.a1 != 0.0 && !cfg.spreading.allow_a1) {
    log << "warning: spreading law is stated for a1 = 0; a1 = " << cfg.problem.a1 << "\n";
  }
  const auto res = spreading_experiment(cfg);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < res.trace.times.size(); ++i) {
    rows.push_back({res.trace.times[i], res.trace.left_edges[i], res.trace.right_edges[i], res.trace.Gamma[i]});
  }
  atomic_write(out / "support.csv", numeric_csv("t,x_left,x_right,Gamma", rows));
  atomic_write(out / "ledger.csv", ledger_csv(res.ledger));
  write_snapshots(out, res.ledger, cfg.problem);
  json report{{"command", "spreading"},
              {"problem", problem_json(cfg.problem)},
              {"solver", solver_json(cfg.solver)},
              {"center", number(res.center)},
              {"r0", number(res.trace.r0)},
              {"window", {number(res.t_a), number(res.t_b)}},
              {"fit", res.fit},
              {"target", number(res.target)},
              {"deviation", number(res.fit.exponent - res.target)},
              {"ledger", ledger_meta(res.ledger)},
              {"exit_status", kExitOk}};
  write_json(out / "report.json", report);
  log << "spreading: exponent " << res.fit.exponent << " (1/(n+4) = " << res.target << ")\n";
  return kExitOk;
}

int cmd_regime(const ExperimentConfig& config, const CommandOptions& opt, std::ostream& log) {
  const auto [cfg, out] = prepare(config, opt);
  const auto rows = regime_map(cfg);
  atomic_write(out / "regime_map.csv", regime_csv(rows));
  log << "regime: " << rows.size() << " cells\n";
  return kExitOk;
}

int run_command(std::string_view name, const fs::path& config_path, const CommandOptions& opt, std::ostream& log) {
  try {
    const auto cfg = load_config(config_path);
    if (name == "simulate") return cmd_simulate(cfg, opt, log);
    if (name == "dispersion") return cmd_dispersion(cfg, opt, log);
    if (name == "certify-blowup") return cmd_certify_blowup(cfg, opt, log);
    if (name == "spreading") return cmd_spreading(cfg, opt, log);
    if (name == "regime") return cmd_regime(cfg, opt, log);
    log << "unknown command '" << name << "'\n";
    return kExitConfig;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_status_for(e);
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace thinfilm
