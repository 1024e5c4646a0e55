#ifndef DYNER_SRC_CHECKED_SOLVE_HPP
#define DYNER_SRC_CHECKED_SOLVE_HPP

#include <string>

#include "dyner/errors.hpp"
#include "dyner/linalg.hpp"

namespace dyner::detail {

inline constexpr double kMinReciprocalCondition = 1e-14;

// Partial-pivoting LU that refuses numerically singular systems.
inline Eigen::PartialPivLU<Matrix> checked_lu(const Matrix& a,
                                              const char* what) {
  Eigen::PartialPivLU<Matrix> lu(a);
  if (!(lu.rcond() > kMinReciprocalCondition)) {
    fail(ErrorCode::kSingularSystem, std::string(what) + ": singular system");
  }
  return lu;
}

inline Matrix checked_inverse(const Matrix& a, const char* what) {
  return checked_lu(a, what).inverse();
}

}  // namespace dyner::detail

#endif  // DYNER_SRC_CHECKED_SOLVE_HPP
