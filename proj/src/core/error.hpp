#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lobres {

// Numeric values are mirrored by lobres_status in the C header.
enum class ErrorCode : int {
  InvalidArgument = 1,
  Io = 2,
  Parse = 3,
  UnknownOrderId = 4,
  DuplicateOrderId = 5,
  VolumeExceedsResting = 6,
  CrossedBookRejected = 7,
  NonMonotonicTimestamp = 8,
  EmptySide = 9,
  DegenerateR = 10,
  DegenerateDistribution = 11,
  RankDeficientDesign = 12,
  TooFewObservations = 13,
  MissingFit = 14,
  OutOfRange = 15,
  SingularSystem = 16,
  InsufficientCurves = 17,
  SharedBasisViolation = 18,
  SingularNormalEquations = 19,
  ConstantColumn = 20,
  NonConvergence = 21,
  Config = 22,
  Internal = 99,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace lobres
