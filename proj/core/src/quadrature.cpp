#include "dyner/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "dyner/errors.hpp"

namespace dyner {

namespace {

// Legendre polynomial P_n(x) and its derivative by the three-term recurrence.
void legendre(int n, double x, double& value, double& derivative) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  value = p1;
  derivative = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

QuadratureRule gauss_legendre(int n, double lo, double hi) {
  require(n >= 1, "gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (hi + lo);
  const double half = 0.5 * (hi - lo);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double value = 0.0, derivative = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      legendre(n, x, value, derivative);
      const double dx = value / derivative;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    legendre(n, x, value, derivative);
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double fa,
                    double b, double fb, double m, double fm, double whole,
                    double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) {
    fail(ErrorCode::kQuadratureFailure, "adaptive_simpson: depth exhausted");
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double lo,
                        double hi, double tol, int max_depth) {
  if (hi == lo) return 0.0;
  const double m = 0.5 * (lo + hi);
  const double fa = f(lo), fb = f(hi), fm = f(m);
  // One forced split guards against integrands that look flat at 3 points.
  const double lm = 0.5 * (lo + m), rm = 0.5 * (m + hi);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - lo) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (hi - m) / 6.0 * (fm + 4.0 * frm + fb);
  return simpson_step(f, lo, fa, m, fm, lm, flm, left, 0.5 * tol, max_depth) +
         simpson_step(f, m, fm, hi, fb, rm, frm, right, 0.5 * tol, max_depth);
}

}  // namespace dyner
