#ifndef DYNER_QUADRATURE_HPP
#define DYNER_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace dyner {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [lo, hi]; weights sum to hi - lo.
QuadratureRule gauss_legendre(int n, double lo, double hi);

/// Adaptive Simpson quadrature to absolute tolerance `tol`.  Throws
/// Error{QuadratureFailure} if the recursion depth is exhausted.
double adaptive_simpson(const std::function<double(double)>& f, double lo,
                        double hi, double tol = 1e-10, int max_depth = 50);

}  // namespace dyner

#endif  // DYNER_QUADRATURE_HPP
