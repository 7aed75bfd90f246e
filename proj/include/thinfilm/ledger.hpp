#pragma once

#include <string>
#include <vector>

#include "thinfilm/field.hpp"
#include "thinfilm/functionals.hpp"
#include "thinfilm/model.hpp"

namespace thinfilm {

struct LedgerEvent {
  double t = 0.0;
  std::string kind;  // "reject", "collapse", "h1_cap", "contact", "smoothing", ...
  std::string detail;
};

struct SegmentRecord {
  double t_start = 0.0;
  double t_loc = 0.0;   // existence-time estimate at the segment start
  double length = 0.0;  // span actually run
};

struct Snapshot {
  double t = 0.0;
  Field h;
};

/// Time series of one run. Sample times are strictly increasing.
struct RunLedger {
  std::vector<FunctionalSample> samples;
  std::vector<LedgerEvent> events;
  std::vector<SegmentRecord> segments;
  std::vector<Snapshot> snapshots;
  double lift = 0.0;  // constant added to the initial data
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  bool collapsed = false;

  /// Appends unless `s.t` equals the last sample time (then replaces it).
  void push(const FunctionalSample& s);
  /// Recomputes the B1, B2, Btilde columns from the sup column.
  void refresh_history(const ProblemParams& p);
  /// Appends `other`, dropping its first sample when it repeats our last time.
  void extend(const RunLedger& other);
};

}  // namespace thinfilm
