#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thinfilm {

enum class Errc {
  DomainError,
  NonpositiveField,
  NotCritical,
  ZeroDestabilization,
  ExponentOutOfRange,
  UnorderedSamples,
  EmptyData,
  LinearSolveFailure,
  StepCollapse,
  RegionError,
  NotNegativeEnergy,
  DomainTooSmall,
  NoBlowupWithinHorizon,
  BoundaryContact,
  InsufficientSpread,
  HypothesisFailed,
  BadShape,
  FitFailure,
  ConfigError,
  InvalidArgument,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

/// Library-wide exception; `code()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace thinfilm
