#ifndef DYNER_BACKGROUND_CHAIN_HPP
#define DYNER_BACKGROUND_CHAIN_HPP

#include <cstdint>
#include <vector>

#include "dyner/linalg.hpp"
#include "dyner/rng.hpp"

namespace dyner {

struct ChainTolerances {
  /// Row sums of a generator must vanish to this level, relative to
  /// max(1, largest |q_ij| in the row).
  double row_sum = 1e-12;
  /// Identity checks (pi Q = 0, D 1 = 0, ...) performed in tests.
  double identity = 1e-9;
};

/// Validated generator of an irreducible continuous-time Markov chain on
/// {0, ..., d-1}.  Immutable.
class Generator {
 public:
  /// Throws Error{RowSumNonzero | NegativeOffDiagonal | Reducible}.
  static Generator validate(const Matrix& rates, const ChainTolerances& tol = {});

  const Matrix& rates() const { return rates_; }
  int states() const { return static_cast<int>(rates_.rows()); }
  double exit_rate(int i) const { return -rates_(i, i); }

  /// Generator with every rate multiplied by `factor` > 0 (time change).
  Generator scaled(double factor) const;

 private:
  explicit Generator(Matrix rates) : rates_(std::move(rates)) {}
  Matrix rates_;
};

inline Generator validate_generator(const Matrix& rates,
                                    const ChainTolerances& tol = {}) {
  return Generator::validate(rates, tol);
}

/// Stationary vector pi (pi Q = 0, sum = 1) by a direct LU solve of
/// (Q^T + 1 1^T) pi = 1.
Vector stationary_distribution(const Generator& chain);

/// D = (1 pi^T - Q)^{-1} - 1 pi^T.
Matrix deviation_matrix(const Generator& chain, const Vector& pi);

struct ChainSummary {
  Vector pi;
  Matrix deviation;
};

ChainSummary summarize(const Generator& chain);

/// (k Gamma - n Q)^{-1} with Gamma = diag(gamma).
Matrix resolvent_exact(const Generator& chain, const Vector& gamma, int k,
                       double n);

/// Two-term large-n expansion of (k Gamma - n Q)^{-1}:
///   leading + correction / n + O(n^-2),
/// leading = (1 / (k gamma*)) 1 pi^T and
/// correction = (I - 1 pi^T Gamma / gamma*) D (I - gamma pi^T / gamma*),
/// which does not depend on k.
struct ResolventExpansion {
  Matrix leading;
  Matrix correction;
  double gamma_star = 0.0;

  Matrix evaluate(double n) const { return leading + correction / n; }
};

ResolventExpansion resolvent_expansion(const Generator& chain,
                                       const Vector& gamma, int k);

/// Per-state jump distributions q_ij / q_i (used by the path samplers).
std::vector<DiscreteSampler> jump_samplers(const Generator& chain);

/// Piecewise-constant regime path on [0, horizon]: state `states[j]` holds on
/// [jump_times[j], jump_times[j+1]) with jump_times[0] = 0.
struct RegimePath {
  std::vector<double> jump_times;
  std::vector<int> states;
  double horizon = 0.0;

  int state_at(double t) const;
  std::size_t jumps() const { return states.empty() ? 0 : states.size() - 1; }
  /// Time spent in each state over [0, horizon].
  Vector occupation(int d) const;
};

/// Exact CTMC sample.  `initial_state` < 0 draws X(0) from pi.
RegimePath sample_regime_path(const Generator& chain, double horizon,
                              CounterRng& rng, int initial_state = -1);

RegimePath sample_regime_path(const Generator& chain, double horizon,
                              std::uint64_t seed, int initial_state = -1);

}  // namespace dyner

#endif  // DYNER_BACKGROUND_CHAIN_HPP
