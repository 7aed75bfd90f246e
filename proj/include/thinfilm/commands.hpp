#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thinfilm/analysis.hpp"
#include "thinfilm/config.hpp"
#include "thinfilm/errors.hpp"
#include "thinfilm/ledger.hpp"
#include "thinfilm/model.hpp"

namespace thinfilm {

enum ExitStatus : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitCollapse = 2,
  kExitViolation = 3,
  kExitFailure = 4,  // any other library error, e.g. DomainTooSmall or InsufficientSpread
};

int exit_status_for(const Error& e) noexcept;

struct CommandOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides output.dir
  std::optional<std::uint64_t> seed;             // overrides run.seed
  bool force = false;                            // certify-blowup outside the blow-up region
};

/// Worker count from THINFILM_THREADS, else the hardware concurrency; at least 1.
std::size_t worker_count();

/// Runs fn(0..count-1) on up to worker_count() threads. Rethrows the first
/// exception after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

// ---- dispersion -------------------------------------------------------------

struct DispersionRow {
  int k = 0;
  double xi = 0.0;
  double sigma_measured = 0.0;
  double sigma_formula = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;  // abs_err / |sigma_formula|, inf for a neutral mode
  double fit_residual = 0.0;
};

/// Growth rate of cos(xi x), xi = k pi / a, about hbar from an unlifted run
/// and a log-amplitude fit. Throws FitFailure when the fit rms exceeds fit_tol.
DispersionRow measure_growth(const ProblemParams& p, const SolverConfig& cfg, const DispersionOptions& opt,
                             int k);

/// Modes k = 1..k_max, evaluated in parallel.
std::vector<DispersionRow> dispersion_table(const ExperimentConfig& cfg);

// ---- regime map -----------------------------------------------------------------

struct RegimeRow {
  Exponent n;
  Exponent m;
  RegimeReport report;
};

std::vector<RegimeRow> regime_map(const ExperimentConfig& cfg);
std::string regime_csv(const std::vector<RegimeRow>& rows);

// ---- spreading ------------------------------------------------------------------

struct SpreadingResult {
  RunLedger ledger;
  SupportTrace trace;
  SpreadingFit fit;
  double t_a = 0.0;
  double t_b = 0.0;
  double center = 0.0;
  double target = 0.0;  // 1 / (n + 4)
};

/// Runs the droplet and fits Gamma over the configured window. Throws
/// InsufficientSpread when the front never enters or never leaves the window.
SpreadingResult spreading_experiment(const ExperimentConfig& cfg);

// ---- subcommands ----------------------------------------------------------------

int cmd_simulate(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_dispersion(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_certify_blowup(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_spreading(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_regime(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& log);

/// Loads the config and dispatches by name; library errors become exit statuses.
int run_command(std::string_view name, const std::filesystem::path& config_path, const CommandOptions& opt,
                std::ostream& log);

}  // namespace thinfilm
