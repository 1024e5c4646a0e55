#include "dyner/errors.hpp"

namespace dyner {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kRowSumNonzero: return "RowSumNonzero";
    case ErrorCode::kNegativeOffDiagonal: return "NegativeOffDiagonal";
    case ErrorCode::kReducible: return "Reducible";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kNumericallyUnstable: return "NumericallyUnstable";
    case ErrorCode::kStepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::kDegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::kUnstableSecondMoment: return "UnstableSecondMoment";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kZeroRateAtom: return "ZeroRateAtom";
    case ErrorCode::kInsufficientReplications: return "InsufficientReplications";
    case ErrorCode::kQuadratureFailure: return "QuadratureFailure";
    case ErrorCode::kStepTooLarge: return "StepTooLarge";
    case ErrorCode::kNoFiniteMaximizer: return "NoFiniteMaximizer";
    case ErrorCode::kMgfDiverges: return "MgfDiverges";
    case ErrorCode::kUnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kTaskFailed: return "TaskFailed";
  }
  return "Unknown";
}

}  // namespace dyner
