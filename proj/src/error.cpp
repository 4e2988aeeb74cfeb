#include "dsps/error.hpp"

namespace dsps {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::DuplicateMemberId: return "DuplicateMemberId";
    case ErrorCode::DuplicateFeatureName: return "DuplicateFeatureName";
    case ErrorCode::UnknownFeature: return "UnknownFeature";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::OutOfRangeProbability: return "OutOfRangeProbability";
    case ErrorCode::DegenerateWeight: return "DegenerateWeight";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::DuplicateTarget: return "DuplicateTarget";
    case ErrorCode::MissingPrerequisiteTarget: return "MissingPrerequisiteTarget";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::InvalidSampleSize: return "InvalidSampleSize";
    case ErrorCode::InvalidHyperParams: return "InvalidHyperParams";
    case ErrorCode::AllDrawsDegenerate: return "AllDrawsDegenerate";
    case ErrorCode::ZeroTarget: return "ZeroTarget";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EmptyIndices: return "EmptyIndices";
    case ErrorCode::InsufficientForOrder: return "InsufficientForOrder";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace dsps
