#ifndef DYNER_LINALG_HPP
#define DYNER_LINALG_HPP

#include <Eigen/Dense>

namespace dyner {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

inline Vector ones(Eigen::Index n) { return Vector::Ones(n); }

}  // namespace dyner

#endif  // DYNER_LINALG_HPP
