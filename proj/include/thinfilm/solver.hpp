#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "thinfilm/analysis.hpp"
#include "thinfilm/field.hpp"
#include "thinfilm/ledger.hpp"
#include "thinfilm/model.hpp"
#include "thinfilm/solver_config.hpp"

namespace thinfilm {

struct RunState {
  Field h;
  double t = 0.0;
  double dt = 0.0;
  RunLedger ledger;
  std::size_t step_count = 0;
  int consecutive_accepts = 0;
  double dissipation = 0.0;  // accumulated dt * int f (a0 h_xxx + a1 D'' h_x)^2
};

struct StepReport {
  bool accepted = false;
  double residual = 0.0;
  int iterations = 0;
  double dt = 0.0;
  std::string reason;  // why a step was rejected
};

/// h0 + eps^theta, optionally low-pass filtered first (modes above Nx/3 removed).
/// Throws EmptyData for zero mass.
Field lift_initial_data(const Field& h0, const SolverConfig& cfg);

/// State at t = 0 with one sample recorded; `lift` is stored in the ledger.
RunState make_state(Field h, const ProblemParams& p, const SolverConfig& cfg, double lift);

/// One backward Euler step of size state.dt. Accepted steps advance the state;
/// rejected ones halve state.dt. Throws StepCollapse once dt falls below dt_min.
StepReport implicit_step(RunState& state, const ProblemParams& p, const SolverConfig& cfg);

FunctionalSample sample_state(const Field& h, double t, const ProblemParams& p, const SolverConfig& cfg,
                              double lift, double dissipation);

enum class StopReason { Reached, H1Cap, Collapse };

/// Advances to t_stop with adaptive steps. Collapse and the H1 cap end the run
/// early and are recorded as ledger events.
StopReason run_until(RunState& state, const ProblemParams& p, const SolverConfig& cfg, double t_stop,
                     double h1_cap);

/// Runs an already lifted field over [0, t_span] with cap cfg.h1_cap.
RunState run_segment(const Field& h0, const ProblemParams& p, const SolverConfig& cfg, double t_span,
                     double lift = 0.0);

/// Lifts h0 and continues segment by segment, each of length
/// max(T_loc, segment_floor) with T_loc re-estimated at its start.
/// Throws RegionError outside the subcritical regime or the critical one below M_c.
RunLedger continue_global(const Field& h0, const ProblemParams& p, const SolverConfig& cfg, double t_goal);

enum class BlowupOutcome { H1Cap, StepCollapse, NoBlowupWithinHorizon, DomainTooSmall };
std::string_view to_string(BlowupOutcome o) noexcept;

struct BlowupRun {
  RunLedger ledger;
  BlowupOutcome outcome = BlowupOutcome::NoBlowupWithinHorizon;
  std::optional<BlowupCertificate> certificate;  // absent when the support hit the boundary
  double h1_initial = 0.0;
  double h1_cap = 0.0;
  Field final_state;
};

/// Blow-up continuation for unlifted, compactly supported h0 with negative
/// energy. h1_cap = cfg.h1_cap when finite, else 1e3 times the initial H1 norm.
/// Throws NotNegativeEnergy, DomainTooSmall (support margin below 20% of the
/// period) and RegionError (outside the blow-up region unless `force`).
BlowupRun continue_to_blowup(const Field& h0, const ProblemParams& p, const SolverConfig& cfg,
                             double horizon, double tol_ineq = 0.05, bool force = false);

}  // namespace thinfilm
