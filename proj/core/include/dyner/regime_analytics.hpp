#ifndef DYNER_REGIME_ANALYTICS_HPP
#define DYNER_REGIME_ANALYTICS_HPP

#include <span>
#include <vector>

#include "dyner/background_chain.hpp"
#include "dyner/linalg.hpp"
#include "dyner/moment_report.hpp"

namespace dyner {

/// Whether the background generator is sped up as Q -> N^delta Q.
enum class Scaling { kUnscaled, kScaled };

/// N potential edges, each switching on at rate lambda_i and off at rate mu_i
/// while the background chain sits in regime i.
class RegimeModel {
 public:
  RegimeModel(Generator chain, Vector lambda, Vector mu, int edges,
              double delta = 1.0);

  const Generator& chain() const { return chain_; }
  const ChainSummary& summary() const { return summary_; }
  const Vector& lambda() const { return lambda_; }
  const Vector& mu() const { return mu_; }
  Vector gamma() const { return lambda_ + mu_; }
  int edges() const { return edges_; }
  double delta() const { return delta_; }
  int regimes() const { return chain_.states(); }

  /// N^delta for kScaled, 1 otherwise.
  double speedup(Scaling scaling) const;
  Generator effective_chain(Scaling scaling) const;

  double lambda_star() const { return summary_.pi.dot(lambda_); }
  double mu_star() const { return summary_.pi.dot(mu_); }
  double gamma_star() const { return lambda_star() + mu_star(); }
  double rho_bar() const { return lambda_star() / gamma_star(); }

  RegimeModel with_edges(int edges) const;
  /// Same model with lambda and mu exchanged (the law of N - Y).
  RegimeModel swapped() const;

 private:
  Generator chain_;
  ChainSummary summary_;
  Vector lambda_;
  Vector mu_;
  int edges_;
  double delta_;
};

/// e_k (k = 1..kmax) with entries e_{i,k} = E[(Y)_k 1{X = i}].
struct FactorialMomentTable {
  std::vector<Vector> e;

  int kmax() const { return static_cast<int>(e.size()); }
  const Vector& operator()(int k) const { return e.at(k - 1); }
  double total(int k) const { return e.at(k - 1).sum(); }
};

/// Stationary factorial moments from the product formula
///   e_k^T = k! (N)_k pi^T Lambda (Gamma - Q)^{-1} Lambda (2 Gamma - Q)^{-1} ...
///           Lambda (k Gamma - Q)^{-1},
/// cross-checked internally against the one-step recursion
///   e_k^T = k (N - k + 1) e_{k-1}^T Lambda (k Gamma - Q)^{-1}.
/// Requires 1 <= kmax <= N + 1; e_{N+1} = 0.
FactorialMomentTable factorial_moments(const RegimeModel& model, int kmax,
                                       Scaling scaling);

double stationary_mean(const RegimeModel& model, Scaling scaling);

/// Exact stationary Var Y = E Y(Y-1) + E Y - (E Y)^2.
double stationary_variance(const RegimeModel& model, Scaling scaling);

enum class JointMethod { kFromMoments, kGeneratorSolve };

/// p(m, i) = P(Y = m, X = i), an (N+1) x d matrix.
struct JointDistribution {
  Matrix p;

  Vector edge_marginal() const { return p.rowwise().sum(); }
  Vector regime_marginal() const { return p.colwise().sum().transpose(); }
  double mean() const;
  double variance() const;
  double total() const { return p.sum(); }
};

double total_variation(const JointDistribution& a, const JointDistribution& b);

/// Largest N accepted by JointMethod::kFromMoments.
inline constexpr int kMaxEdgesFromMoments = 30;

JointDistribution stationary_joint(const RegimeModel& model, JointMethod method,
                                   Scaling scaling);

struct TransientOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  /// Steps shorter than this (times max(1, t)) raise StepSizeUnderflow.
  double min_step = 1e-12;
};

/// Distribution of (Y(t), X(t)) from Y(0) = y0 and X(0) ~ x0, by adaptive
/// Dormand-Prince integration of the forward equations on the joint space.
/// `times` must be nondecreasing and >= 0.
std::vector<JointDistribution> transient_distribution(
    const RegimeModel& model, int y0, const Vector& x0,
    std::span<const double> times, Scaling scaling,
    const TransientOptions& options = {});

JointDistribution transient_distribution(const RegimeModel& model, int y0,
                                         const Vector& x0, double t,
                                         Scaling scaling,
                                         const TransientOptions& options = {});

/// Var Y = N rho(1 - rho) + N^{2 - delta} v + o(N^{max(1, 2 - delta)}) with
/// v = pi^T (Lambda - rho Gamma) D (Lambda - rho Gamma) 1 / gamma*.
struct VarianceExpansion {
  double rho_bar = 0.0;
  double v = 0.0;

  double predict(double edges, double delta) const;
  /// Per-edge variance coefficient at delta = 1.
  double linear_coefficient() const { return rho_bar * (1.0 - rho_bar) + v; }
};

VarianceExpansion scaled_variance_expansion(const RegimeModel& model);

/// Analytic summary used by the CLI: exact mean and variance under
/// `scaling`, plus the expansion coefficients.
MomentReport regime_moment_report(const RegimeModel& model, Scaling scaling);

}  // namespace dyner

#endif  // DYNER_REGIME_ANALYTICS_HPP
