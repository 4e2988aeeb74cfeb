#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsps {

enum class ErrorCode {
  MalformedCsv,
  NonNumericCell,
  DuplicateMemberId,
  DuplicateFeatureName,
  UnknownFeature,
  LengthMismatch,
  EmptySelection,
  InsufficientData,
  ZeroVariance,
  OutOfRangeProbability,
  DegenerateWeight,
  InvalidTarget,
  DuplicateTarget,
  MissingPrerequisiteTarget,
  DimensionMismatch,
  NumericalBreakdown,
  IterationLimit,
  Infeasible,
  InvalidSampleSize,
  InvalidHyperParams,
  AllDrawsDegenerate,
  ZeroTarget,
  NonPositiveInput,
  InvalidSpec,
  EmptyIndices,
  InsufficientForOrder,
  IndexOutOfRange,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dsps
