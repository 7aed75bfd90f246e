#include "thinfilm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view want) {
  throw Error(Errc::ConfigError,
              std::string(key) + ": expected " + std::string(want) + ", got '" + std::string(value) + "'");
}

double to_double(std::string_view key, std::string_view v) {
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto* first = v.data();
  if (!v.empty() && v.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || std::isnan(out)) bad(key, v, "a number");
  return out;
}

long long to_int(std::string_view key, std::string_view v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(key, v, "an integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, v, "true or false");
}

Exponent to_exponent(std::string_view key, std::string_view v) {
  try {
    return Exponent::parse(v);
  } catch (const Error&) {
    bad(key, v, "a number or fraction");
  }
}

std::string unquote(std::string_view v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  return std::string(v);
}

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const auto table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto dbl = [&t](const char* key, auto member) {
      t[key] = [member](ExperimentConfig& c, std::string_view k, std::string_view v) { member(c) = to_double(k, v); };
    };
    auto integer = [&t](const char* key, auto member) {
      t[key] = [member](ExperimentConfig& c, std::string_view k, std::string_view v) {
        member(c) = static_cast<std::remove_reference_t<decltype(member(c))>>(to_int(k, v));
      };
    };
    auto boolean = [&t](const char* key, auto member) {
      t[key] = [member](ExperimentConfig& c, std::string_view k, std::string_view v) { member(c) = to_bool(k, v); };
    };
    auto exponent = [&t](const char* key, auto member) {
      t[key] = [member](ExperimentConfig& c, std::string_view k, std::string_view v) { member(c) = to_exponent(k, v); };
    };

    exponent("problem.n", [](ExperimentConfig& c) -> Exponent& { return c.problem.n; });
    exponent("problem.m", [](ExperimentConfig& c) -> Exponent& { return c.problem.m; });
    dbl("problem.a0", [](ExperimentConfig& c) -> double& { return c.problem.a0; });
    dbl("problem.a1", [](ExperimentConfig& c) -> double& { return c.problem.a1; });
    dbl("problem.a", [](ExperimentConfig& c) -> double& { return c.problem.a; });
    integer("problem.nx", [](ExperimentConfig& c) -> int& { return c.problem.nx; });

    dbl("solver.eps", [](ExperimentConfig& c) -> double& { return c.solver.eps; });
    dbl("solver.delta", [](ExperimentConfig& c) -> double& { return c.solver.delta; });
    dbl("solver.theta", [](ExperimentConfig& c) -> double& { return c.solver.theta; });
    dbl("solver.dt_init", [](ExperimentConfig& c) -> double& { return c.solver.dt_init; });
    dbl("solver.dt_min", [](ExperimentConfig& c) -> double& { return c.solver.dt_min; });
    dbl("solver.dt_max", [](ExperimentConfig& c) -> double& { return c.solver.dt_max; });
    dbl("solver.t_end", [](ExperimentConfig& c) -> double& { return c.solver.t_end; });
    dbl("solver.newton_tol", [](ExperimentConfig& c) -> double& { return c.solver.newton_tol; });
    integer("solver.newton_max", [](ExperimentConfig& c) -> int& { return c.solver.newton_max; });
    dbl("solver.h1_cap", [](ExperimentConfig& c) -> double& { return c.solver.h1_cap; });
    dbl("solver.supp_tol", [](ExperimentConfig& c) -> double& { return c.solver.supp_tol; });
    dbl("solver.max_rel_change", [](ExperimentConfig& c) -> double& { return c.solver.max_rel_change; });
    integer("solver.sample_every", [](ExperimentConfig& c) -> int& { return c.solver.sample_every; });
    integer("solver.snapshot_every", [](ExperimentConfig& c) -> int& { return c.solver.snapshot_every; });
    dbl("solver.alpha", [](ExperimentConfig& c) -> double& { return c.solver.alpha; });
    dbl("solver.eps_interp", [](ExperimentConfig& c) -> double& { return c.solver.eps_interp; });
    dbl("solver.segment_floor", [](ExperimentConfig& c) -> double& { return c.solver.segment_floor; });
    boolean("solver.smooth_initial", [](ExperimentConfig& c) -> bool& { return c.solver.smooth_initial; });
    t["solver.mode"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      if (v == "linear") {
        c.solver.mode = StepMode::LinearlyImplicit;
      } else if (v == "newton") {
        c.solver.mode = StepMode::Newton;
      } else {
        bad(k, v, "linear or newton");
      }
    };

    t["initial.kind"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      if (v == "constant") {
        c.initial.kind = InitialKind::Constant;
      } else if (v == "cosine-bump") {
        c.initial.kind = InitialKind::CosineBump;
      } else if (v == "parabolic-droplet") {
        c.initial.kind = InitialKind::ParabolicDroplet;
      } else if (v == "file") {
        c.initial.kind = InitialKind::File;
      } else {
        bad(k, v, "constant, cosine-bump, parabolic-droplet or file");
      }
    };
    dbl("initial.C", [](ExperimentConfig& c) -> double& { return c.initial.C; });
    dbl("initial.A", [](ExperimentConfig& c) -> double& { return c.initial.A; });
    dbl("initial.r0", [](ExperimentConfig& c) -> double& { return c.initial.r0; });
    dbl("initial.center", [](ExperimentConfig& c) -> double& { return c.initial.center; });
    dbl("initial.jitter", [](ExperimentConfig& c) -> double& { return c.initial.jitter; });
    t["initial.path"] = [](ExperimentConfig& c, std::string_view, std::string_view v) { c.initial.path = unquote(v); };

    t["output.dir"] = [](ExperimentConfig& c, std::string_view, std::string_view v) { c.output_dir = unquote(v); };
    t["run.seed"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      const long long s = to_int(k, v);
      if (s < 0) bad(k, v, "a nonnegative integer");
      c.seed = static_cast<std::uint64_t>(s);
    };

    boolean("simulate.global", [](ExperimentConfig& c) -> bool& { return c.simulate.global; });
    dbl("simulate.slack", [](ExperimentConfig& c) -> double& { return c.simulate.slack; });
    boolean("simulate.strict", [](ExperimentConfig& c) -> bool& { return c.simulate.strict; });

    dbl("dispersion.hbar", [](ExperimentConfig& c) -> double& { return c.dispersion.hbar; });
    dbl("dispersion.amplitude", [](ExperimentConfig& c) -> double& { return c.dispersion.amplitude; });
    integer("dispersion.k_max", [](ExperimentConfig& c) -> int& { return c.dispersion.k_max; });
    dbl("dispersion.dt", [](ExperimentConfig& c) -> double& { return c.dispersion.dt; });
    dbl("dispersion.t_max", [](ExperimentConfig& c) -> double& { return c.dispersion.t_max; });
    dbl("dispersion.fit_tol", [](ExperimentConfig& c) -> double& { return c.dispersion.fit_tol; });

    dbl("blowup.horizon", [](ExperimentConfig& c) -> double& { return c.blowup.horizon; });
    dbl("blowup.horizon_factor", [](ExperimentConfig& c) -> double& { return c.blowup.horizon_factor; });
    dbl("blowup.tol", [](ExperimentConfig& c) -> double& { return c.blowup.tol; });

    dbl("spreading.r_start", [](ExperimentConfig& c) -> double& { return c.spreading.r_start; });
    dbl("spreading.decades", [](ExperimentConfig& c) -> double& { return c.spreading.decades; });
    dbl("spreading.t_a", [](ExperimentConfig& c) -> double& { return c.spreading.t_a; });
    dbl("spreading.t_b", [](ExperimentConfig& c) -> double& { return c.spreading.t_b; });
    boolean("spreading.allow_a1", [](ExperimentConfig& c) -> bool& { return c.spreading.allow_a1; });

    exponent("regime.n_min", [](ExperimentConfig& c) -> Exponent& { return c.regime.n_min; });
    exponent("regime.n_max", [](ExperimentConfig& c) -> Exponent& { return c.regime.n_max; });
    exponent("regime.n_step", [](ExperimentConfig& c) -> Exponent& { return c.regime.n_step; });
    exponent("regime.m_min", [](ExperimentConfig& c) -> Exponent& { return c.regime.m_min; });
    exponent("regime.m_max", [](ExperimentConfig& c) -> Exponent& { return c.regime.m_max; });
    exponent("regime.m_step", [](ExperimentConfig& c) -> Exponent& { return c.regime.m_step; });
    return t;
  }();
  return table;
}

void validate(const ExperimentConfig& c) {
  auto wrap = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.code() == Errc::ConfigError) throw;
      throw Error(Errc::ConfigError, e.what());
    }
  };
  wrap([&] { c.problem.validate(); });
  wrap([&] { c.solver.validate(); });
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw Error(Errc::ConfigError, what);
  };
  const auto& ic = c.initial;
  switch (ic.kind) {
    case InitialKind::Constant:
      need(ic.C > 0.0, "initial.C must be > 0");
      break;
    case InitialKind::CosineBump:
    case InitialKind::ParabolicDroplet:
      need(ic.A > 0.0, "initial.A must be > 0");
      need(ic.r0 > 0.0, "initial.r0 must be > 0");
      need(ic.jitter >= 0.0, "initial.jitter must be >= 0");
      break;
    case InitialKind::File:
      need(!ic.path.empty(), "initial.path is required for kind = file");
      break;
  }
  need(c.simulate.slack >= 0.0, "simulate.slack must be >= 0");
  need(c.dispersion.hbar > 0.0, "dispersion.hbar must be > 0");
  need(c.dispersion.amplitude >= 0.0, "dispersion.amplitude must be >= 0");
  need(c.dispersion.k_max >= 0, "dispersion.k_max must be >= 0");
  need(c.dispersion.dt > 0.0 && c.dispersion.t_max > 0.0, "dispersion.dt and dispersion.t_max must be > 0");
  need(c.dispersion.fit_tol > 0.0, "dispersion.fit_tol must be > 0");
  need(c.blowup.horizon >= 0.0 && c.blowup.horizon_factor > 0.0, "blowup horizon settings must be positive");
  need(c.blowup.tol >= 0.0, "blowup.tol must be >= 0");
  need(c.spreading.r_start > 0.0 && c.spreading.r_start < 1.0, "spreading.r_start must lie in (0, 1)");
  need(c.spreading.decades > 0.0, "spreading.decades must be > 0");
  need(c.regime.n_step.value > 0.0, "regime.n_step must be > 0");
  need(c.regime.m_step.value > 0.0, "regime.m_step must be > 0");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  bool have_n = false, have_m = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw Error(Errc::ConfigError, "unknown key '" + std::string(key) + "'");
    if (value.empty()) throw Error(Errc::ConfigError, std::string(key) + ": missing value");
    it->second(cfg, key, value);
    if (key == "problem.n") have_n = true;
    if (key == "problem.m") have_m = true;
  }
  if (!have_n) throw Error(Errc::ConfigError, "missing required key problem.n");
  if (!have_m) throw Error(Errc::ConfigError, "missing required key problem.m");
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto cfg = parse_config(ss.str());
  // relative initial.path resolves against the config file
  if (cfg.initial.kind == InitialKind::File && std::filesystem::path(cfg.initial.path).is_relative()) {
    cfg.initial.path = (path.parent_path() / cfg.initial.path).string();
  }
  return cfg;
}

Field initial_field(const ExperimentConfig& cfg) {
  const auto& p = cfg.problem;
  const auto& ic = cfg.initial;
  const std::size_t N = static_cast<std::size_t>(p.nx);
  const double dx = p.dx(), x0 = -p.a;
  std::vector<double> v(N, 0.0);
  double center = ic.center;
  if (ic.jitter > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    center += std::uniform_real_distribution<double>(-ic.jitter, ic.jitter)(rng);
  }
  switch (ic.kind) {
    case InitialKind::Constant:
      std::fill(v.begin(), v.end(), ic.C);
      break;
    case InitialKind::CosineBump:
      for (std::size_t i = 0; i < N; ++i) {
        const double s = x0 + static_cast<double>(i) * dx - center;
        if (std::abs(s) < ic.r0) v[i] = ic.A * (1.0 + std::cos(std::numbers::pi * s / ic.r0));
      }
      break;
    case InitialKind::ParabolicDroplet:
      for (std::size_t i = 0; i < N; ++i) {
        const double s = (x0 + static_cast<double>(i) * dx - center) / ic.r0;
        v[i] = std::max(0.0, ic.A * (1.0 - s * s));
      }
      break;
    case InitialKind::File: {
      std::ifstream in(ic.path);
      if (!in) throw Error(Errc::ConfigError, "cannot open initial.path " + ic.path);
      std::vector<double> col;
      std::string line;
      while (std::getline(in, line)) {
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        std::istringstream ls{std::string(sv)};
        std::vector<double> cells;
        double d;
        while (ls >> d) cells.push_back(d);
        if (cells.empty() || cells.size() > 2 || !ls.eof()) {
          throw Error(Errc::ConfigError, "initial file: bad row '" + std::string(sv) + "'");
        }
        col.push_back(cells.back());
      }
      if (col.size() != N) {
        throw Error(Errc::ConfigError, "initial file has " + std::to_string(col.size()) + " rows, problem.nx = " +
                                           std::to_string(N));
      }
      v = std::move(col);
      break;
    }
  }
  return Field(std::move(v), dx, x0);
}

}  // namespace thinfilm
