#include "core/error.hpp"

namespace lobres {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::UnknownOrderId: return "UnknownOrderId";
    case ErrorCode::DuplicateOrderId: return "DuplicateOrderId";
    case ErrorCode::VolumeExceedsResting: return "VolumeExceedsResting";
    case ErrorCode::CrossedBookRejected: return "CrossedBookRejected";
    case ErrorCode::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case ErrorCode::EmptySide: return "EmptySide";
    case ErrorCode::DegenerateR: return "DegenerateR";
    case ErrorCode::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::RankDeficientDesign: return "RankDeficientDesign";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::MissingFit: return "MissingFit";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::InsufficientCurves: return "InsufficientCurves";
    case ErrorCode::SharedBasisViolation: return "SharedBasisViolation";
    case ErrorCode::SingularNormalEquations: return "SingularNormalEquations";
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace lobres
