#include "thinfilm/errors.hpp"

namespace thinfilm {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DomainError: return "DomainError";
    case Errc::NonpositiveField: return "NonpositiveField";
    case Errc::NotCritical: return "NotCritical";
    case Errc::ZeroDestabilization: return "ZeroDestabilization";
    case Errc::ExponentOutOfRange: return "ExponentOutOfRange";
    case Errc::UnorderedSamples: return "UnorderedSamples";
    case Errc::EmptyData: return "EmptyData";
    case Errc::LinearSolveFailure: return "LinearSolveFailure";
    case Errc::StepCollapse: return "StepCollapse";
    case Errc::RegionError: return "RegionError";
    case Errc::NotNegativeEnergy: return "NotNegativeEnergy";
    case Errc::DomainTooSmall: return "DomainTooSmall";
    case Errc::NoBlowupWithinHorizon: return "NoBlowupWithinHorizon";
    case Errc::BoundaryContact: return "BoundaryContact";
    case Errc::InsufficientSpread: return "InsufficientSpread";
    case Errc::HypothesisFailed: return "HypothesisFailed";
    case Errc::BadShape: return "BadShape";
    case Errc::FitFailure: return "FitFailure";
    case Errc::ConfigError: return "ConfigError";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace thinfilm
