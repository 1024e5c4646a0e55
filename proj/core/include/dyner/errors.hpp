#ifndef DYNER_ERRORS_HPP
#define DYNER_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace dyner {

enum class ErrorCode {
  kInvalidArgument,
  kRowSumNonzero,
  kNegativeOffDiagonal,
  kReducible,
  kSingularSystem,
  kNumericallyUnstable,
  kStepSizeUnderflow,
  kDegenerateDenominator,
  kUnstableSecondMoment,
  kNoConvergence,
  kZeroRateAtom,
  kInsufficientReplications,
  kQuadratureFailure,
  kStepTooLarge,
  kNoFiniteMaximizer,
  kMgfDiverges,
  kUnsupportedDimension,
  kConfigInvalid,
  kTaskFailed,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; `code()` identifies
// the failure class named in the public contracts.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::kInvalidArgument, what);
}

}  // namespace dyner

#endif  // DYNER_ERRORS_HPP
