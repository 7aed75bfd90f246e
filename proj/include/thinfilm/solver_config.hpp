#pragma once

#include <cstddef>
#include <limits>

namespace thinfilm {

enum class StepMode {
  LinearlyImplicit,  // mobility and D'' frozen at the previous time level
  Newton,            // fully implicit, Newton on the whole flux
};

struct SolverConfig {
  double eps = 1e-6;
  double delta = 0.0;
  double theta = 0.3;
  double dt_init = 1e-6;
  double dt_min = 1e-14;
  double dt_max = 1e-1;
  double t_end = 1.0;
  double newton_tol = 1e-9;
  int newton_max = 12;
  double h1_cap = std::numeric_limits<double>::infinity();
  double supp_tol = 0.0;         // 0 selects 10 * eps^theta
  double max_rel_change = 0.05;  // reject steps that move max|dh| beyond this fraction of max h
  StepMode mode = StepMode::LinearlyImplicit;
  int sample_every = 10;
  int snapshot_every = 0;  // 0: no snapshots
  double alpha = 0.5;      // exponent of the sampled alpha-entropy
  double eps_interp = 0.1;
  double segment_floor = 0.0;  // lower bound on continuation segment length
  bool smooth_initial = false;

  double lift() const;
  double support_threshold() const;
  /// Throws Error(InvalidArgument) when an invariant fails.
  void validate() const;
};

}  // namespace thinfilm
