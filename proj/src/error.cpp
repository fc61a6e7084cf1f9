#include "rankcorr/error.hpp"

namespace rankcorr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotStandardized: return "NotStandardized";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::EntryOutOfRange: return "EntryOutOfRange";
    case ErrorCode::ReconstructionFailure: return "ReconstructionFailure";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::RankTooHigh: return "RankTooHigh";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::NotUnitNorm: return "NotUnitNorm";
    case ErrorCode::NotAFrame: return "NotAFrame";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::RepairFailed: return "RepairFailed";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace rankcorr
