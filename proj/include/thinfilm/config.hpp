#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "thinfilm/field.hpp"
#include "thinfilm/model.hpp"
#include "thinfilm/solver_config.hpp"

namespace thinfilm {

enum class InitialKind { Constant, CosineBump, ParabolicDroplet, File };

/// Initial profile on the problem grid. Bumps are centred at `center`:
///   cosine-bump        A (1 + cos(pi (x - center) / r0)) for |x - center| < r0
///   parabolic-droplet  A (1 - (x - center)^2 / r0^2)_+
struct InitialSpec {
  InitialKind kind = InitialKind::Constant;
  double C = 1.0;
  double A = 1.0;
  double r0 = 1.0;
  double center = 0.0;
  double jitter = 0.0;  // centre shifted uniformly in [-jitter, jitter] using the seed
  std::string path;  // two columns x h, or one column h
};

struct SimulateOptions {
  bool global = false;        // continue_global instead of a single segment
  double slack = 0.05;        // relative slack of the weighted-bound checks
  bool strict = true;         // inequality violations set exit status 3
};

struct DispersionOptions {
  double hbar = 1.0;
  double amplitude = 0.0;  // 0 selects 1e-6 * hbar
  int k_max = 0;           // 0 selects modes up to twice the band edge
  double dt = 0.01;
  double t_max = 20.0;
  double fit_tol = 1e-3;   // rms of the log-amplitude fit
};

struct BlowupOptions {
  double horizon = 0.0;         // 0 selects horizon_factor * T_ub
  double horizon_factor = 1.2;
  double tol = 0.05;
};

struct SpreadingOptions {
  double r_start = 0.4;   // fit starts when r first reaches r_start * a
  double decades = 1.0;   // length of the fit window in decades of t
  double t_a = 0.0;       // explicit window; used when t_b > t_a
  double t_b = 0.0;
  bool allow_a1 = false;  // silences the a1 != 0 warning
};

/// Grid n_min + i n_step <= n_max (same for m), built exactly when the
/// bounds parse as fractions.
struct RegimeOptions {
  Exponent n_min{0.5}, n_max{3.0}, n_step{0.5};
  Exponent m_min{0.5}, m_max{6.0}, m_step{0.5};
};

struct ExperimentConfig {
  ProblemParams problem;
  SolverConfig solver;
  InitialSpec initial;
  SimulateOptions simulate;
  DispersionOptions dispersion;
  BlowupOptions blowup;
  SpreadingOptions spreading;
  RegimeOptions regime;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
};

/// Parses `section.key = value` lines; '#' starts a comment. Unknown keys,
/// malformed values and a missing problem.n or problem.m throw ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Samples the initial profile on the problem grid (unlifted). Deterministic
/// in (config, seed).
Field initial_field(const ExperimentConfig& cfg);

}  // namespace thinfilm
