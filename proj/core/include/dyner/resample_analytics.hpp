#ifndef DYNER_RESAMPLE_ANALYTICS_HPP
#define DYNER_RESAMPLE_ANALYTICS_HPP

#include <cmath>
#include <vector>

#include "dyner/linalg.hpp"
#include "dyner/moment_report.hpp"
#include "dyner/pair_law.hpp"

namespace dyner {

/// One slot draws (P, R): an absent edge stays absent with probability P and
/// a present edge stays present with probability R, independently per edge.
struct TransitionAtom {
  double p = 1.0;
  double r = 0.0;
  double weight = 1.0;
};

/// Moments of (P, R) entering the closed forms.
struct TransitionMoments {
  double mean_p = 0.0, mean_r = 0.0;
  double mean_p_bar_sq = 0.0;   // E (1-P)^2
  double mean_r_bar_sq = 0.0;   // E (1-R)^2
  double mean_p_bar_r_bar = 0.0;  // E (1-P)(1-R)
  double mean_persist_sq = 0.0;   // E (P+R-1)^2
  double mean_persist_p_bar = 0.0;  // E (P+R-1)(1-P)
};

class TransitionLaw {
 public:
  /// Atoms with p, r in [0, 1] and positive weights summing to 1 (1e-12).
  explicit TransitionLaw(std::vector<TransitionAtom> atoms);
  static TransitionLaw deterministic(double p, double r) {
    return TransitionLaw({{p, r, 1.0}});
  }

  const std::vector<TransitionAtom>& atoms() const { return atoms_; }
  TransitionMoments moments() const;
  /// Roles of P and R exchanged (the law of N - Y).
  TransitionLaw swapped() const;

 private:
  std::vector<TransitionAtom> atoms_;
};

struct ResampleModel {
  TransitionLaw law;
  int edges = 1;

  ResampleModel(TransitionLaw law_in, int edges_in);
};

/// alpha = N (1 - E P) / (2 - E P - E R).  Throws DegenerateDenominator when
/// E P = E R = 1.
double stationary_mean(const ResampleModel& model);

struct ResampleVariance {
  double variance = 0.0;  // alpha - alpha^2 + beta, beta = E Y(Y-1)
  double gamma1 = 0.0;    // Var Y = gamma1 N^2 + gamma2 N
  double gamma2 = 0.0;
};

/// Throws UnstableSecondMoment when E (P+R-1)^2 >= 1 - 1e-12, and
/// NumericallyUnstable if the two closed forms disagree beyond 1e-9.
ResampleVariance stationary_variance(const ResampleModel& model);

/// lim Cov(Y_m, Y_{m+1}) = (EP + ER - 1) E Y^2 + (1 - EP) N E Y - (E Y)^2.
double lag1_covariance(const ResampleModel& model);

/// One-slot kernel K(k, j) = P(Y_{m+1} = j | Y_m = k): the mixture over atoms
/// of Binomial(k, r) convolved with Binomial(N - k, 1 - p).
Matrix transition_kernel(const ResampleModel& model);

struct KernelOptions {
  /// Direct linear solve up to this N, power iteration beyond.
  int direct_limit = 200;
  int max_iterations = 100000;
  double tolerance = 1e-13;
};

/// Stationary law of Y on {0..N}, verified as a fixed point of the kernel:
/// ||v K - v||_1 < 1e-12.  Throws NoConvergence.
Vector kernel_stationary(const ResampleModel& model,
                         const KernelOptions& options = {});

/// (Lambda, M) held constant for a resampling period of length `period`.
struct ContinuousResampleSpec {
  PairLaw lambda_mu;  // a = Lambda (up-rate), b = M (down-rate)
  double period = 1.0;
  int nodes = 64;     // quadrature nodes per dimension for continuous laws
};

/// P = M/G + (Lambda/G) e^{-G period}, R = Lambda/G + (M/G) e^{-G period},
/// G = Lambda + M; weights preserved.  Throws ZeroRateAtom if G = 0.
TransitionLaw embed_continuous(const ContinuousResampleSpec& spec);

/// P = 1 - eta / N^delta,  R = 1 - zeta / N^delta.
struct ScaledResampleLaw {
  PairLaw eta_zeta;  // a = eta (births), b = zeta (deaths)
  double delta = 1.0;
  int nodes = 64;

  ScaledResampleLaw(PairLaw law, double delta_in = 1.0, int nodes_in = 64);

  double speedup(double edges) const { return std::pow(edges, delta); }
  /// Discrete-time law at size N; requires eta, zeta <= N^delta.
  TransitionLaw discrete_law(int edges) const;
  /// Continuous-time law (Lambda, M) = (eta, zeta) embedded at period
  /// N^{-delta}.
  TransitionLaw embedded(int edges) const;
};

struct ScaledMoments {
  double rho_bar = 0.0;
  double v = 0.0;
  double delta = 1.0;
  /// Mean-reversion rate E eta + E zeta of the limit.
  double rate = 0.0;

  double predict(double edges) const {
    return edges * rho_bar * (1.0 - rho_bar) +
           std::pow(edges, 2.0 - delta) * v;
  }
  double linear_coefficient() const { return rho_bar * (1.0 - rho_bar) + v; }
};

/// rho = E eta / (E eta + E zeta),
/// v = [E zeta^2 (E eta)^2 - 2 E eta zeta E eta E zeta + E eta^2 (E zeta)^2]
///     / (2 (E eta + E zeta)^3)
///   = Var(eta - rho (eta + zeta)) / (2 (E eta + E zeta)).
ScaledMoments scaled_moments(const ScaledResampleLaw& law);

/// Leading-order stationary lag-1 correlation 1 - (E eta + E zeta) N^{-delta}.
double scaled_lag1_correlation(const ScaledResampleLaw& law, int edges);

MomentReport resample_moment_report(const ResampleModel& model);

/// Scaled coefficients together with the exact moments of the embedded
/// continuous-time model at size N.
MomentReport resample_moment_report(const ScaledResampleLaw& law, int edges);

}  // namespace dyner

#endif  // DYNER_RESAMPLE_ANALYTICS_HPP
