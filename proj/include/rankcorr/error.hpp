#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rankcorr {

enum class ErrorCode {
  NotSquare,
  NotSymmetric,
  NotStandardized,
  NotPSD,
  EntryOutOfRange,
  ReconstructionFailure,
  NoConvergence,
  TooFewObservations,
  ConstantColumn,
  LengthMismatch,
  RankTooHigh,
  InvalidModel,
  NotUnitNorm,
  NotAFrame,
  DimensionTooSmall,
  OutOfRange,
  RepairFailed,
  NotConverged,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Base exception for every contract violation raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rankcorr
