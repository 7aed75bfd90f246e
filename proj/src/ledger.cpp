#include "thinfilm/ledger.hpp"

#include "thinfilm/errors.hpp"

namespace thinfilm {

void RunLedger::push(const FunctionalSample& s) {
  if (!samples.empty()) {
    if (s.t < samples.back().t) throw Error(Errc::UnorderedSamples, "sample time went backwards");
    if (s.t == samples.back().t) {
      samples.back() = s;
      return;
    }
  }
  samples.push_back(s);
}

void RunLedger::refresh_history(const ProblemParams& p) {
  const auto b1 = weighted_history_series(samples, p, HistoryMode::B1);
  const auto b2 = weighted_history_series(samples, p, HistoryMode::B2);
  const auto bt = weighted_history_series(samples, p, HistoryMode::Btilde);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].B1 = b1[i];
    samples[i].B2 = b2[i];
    samples[i].Btilde = bt[i];
  }
}

void RunLedger::extend(const RunLedger& other) {
  for (const auto& s : other.samples) push(s);
  events.insert(events.end(), other.events.begin(), other.events.end());
  segments.insert(segments.end(), other.segments.begin(), other.segments.end());
  for (const auto& snap : other.snapshots) {
    if (!snapshots.empty() && snap.t <= snapshots.back().t) continue;
    snapshots.push_back(snap);
  }
  accepted_steps += other.accepted_steps;
  rejected_steps += other.rejected_steps;
  collapsed = collapsed || other.collapsed;
}

}  // namespace thinfilm
