#include "dyner/background_chain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "checked_solve.hpp"
#include "dyner/errors.hpp"

namespace dyner {

namespace {

using detail::checked_inverse;
using detail::checked_lu;

// Breadth-first reachability from state 0 along edges i -> j with q_ij > 0
// (forward) or q_ji > 0 (backward).
bool reaches_all(const Matrix& q, bool forward) {
  const Eigen::Index d = q.rows();
  std::vector<bool> seen(d, false);
  std::deque<Eigen::Index> queue{0};
  seen[0] = true;
  Eigen::Index count = 1;
  while (!queue.empty()) {
    const Eigen::Index i = queue.front();
    queue.pop_front();
    for (Eigen::Index j = 0; j < d; ++j) {
      const double rate = forward ? q(i, j) : q(j, i);
      if (j != i && rate > 0.0 && !seen[j]) {
        seen[j] = true;
        ++count;
        queue.push_back(j);
      }
    }
  }
  return count == d;
}

}  // namespace

Generator Generator::validate(const Matrix& rates, const ChainTolerances& tol) {
  require(rates.rows() > 0 && rates.rows() == rates.cols(),
          "generator must be a non-empty square matrix");
  require(rates.allFinite(), "generator entries must be finite");
  const Eigen::Index d = rates.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i != j && rates(i, j) < 0.0) {
        std::ostringstream msg;
        msg << "negative off-diagonal rate q(" << i << "," << j
            << ") = " << rates(i, j);
        fail(ErrorCode::kNegativeOffDiagonal, msg.str());
      }
    }
    const double scale = std::max(1.0, rates.row(i).cwiseAbs().maxCoeff());
    const double sum = rates.row(i).sum();
    if (std::fabs(sum) > tol.row_sum * scale) {
      std::ostringstream msg;
      msg << "row " << i << " sums to " << sum;
      fail(ErrorCode::kRowSumNonzero, msg.str());
    }
  }
  if (!reaches_all(rates, true) || !reaches_all(rates, false)) {
    fail(ErrorCode::kReducible, "generator is not irreducible");
  }
  return Generator(rates);
}

Generator Generator::scaled(double factor) const {
  require(factor > 0.0 && std::isfinite(factor), "scale factor must be positive");
  return Generator(rates_ * factor);
}

Vector stationary_distribution(const Generator& chain) {
  const Matrix& q = chain.rates();
  const Eigen::Index d = q.rows();
  const Matrix a = q.transpose() + Matrix::Ones(d, d);
  Vector pi = checked_lu(a, "stationary_distribution").solve(Vector::Ones(d));
  pi = pi.cwiseMax(0.0);
  return pi / pi.sum();
}

Matrix deviation_matrix(const Generator& chain, const Vector& pi) {
  const Matrix& q = chain.rates();
  const Eigen::Index d = q.rows();
  require(pi.size() == d, "deviation_matrix: pi has wrong length");
  const Matrix one_pi = Vector::Ones(d) * pi.transpose();
  return checked_inverse(one_pi - q, "deviation_matrix") - one_pi;
}

ChainSummary summarize(const Generator& chain) {
  ChainSummary summary;
  summary.pi = stationary_distribution(chain);
  summary.deviation = deviation_matrix(chain, summary.pi);
  return summary;
}

Matrix resolvent_exact(const Generator& chain, const Vector& gamma, int k,
                       double n) {
  const Eigen::Index d = chain.states();
  require(gamma.size() == d, "resolvent_exact: gamma has wrong length");
  require((gamma.array() > 0.0).all(), "resolvent_exact: gamma must be positive");
  require(k >= 1 && n > 0.0, "resolvent_exact: need k >= 1 and n > 0");
  const Matrix system =
      static_cast<double>(k) * gamma.asDiagonal().toDenseMatrix() - n * chain.rates();
  return checked_inverse(system, "resolvent_exact");
}

ResolventExpansion resolvent_expansion(const Generator& chain,
                                       const Vector& gamma, int k) {
  const Eigen::Index d = chain.states();
  require(gamma.size() == d, "resolvent_expansion: gamma has wrong length");
  require((gamma.array() > 0.0).all(),
          "resolvent_expansion: gamma must be positive");
  require(k >= 1, "resolvent_expansion: need k >= 1");
  const ChainSummary summary = summarize(chain);
  const Vector& pi = summary.pi;
  const double gamma_star = pi.dot(gamma);
  const Matrix identity = Matrix::Identity(d, d);
  const Matrix one_pi = Vector::Ones(d) * pi.transpose();

  ResolventExpansion out;
  out.gamma_star = gamma_star;
  out.leading = one_pi / (static_cast<double>(k) * gamma_star);
  const Matrix left = identity - one_pi * gamma.asDiagonal() / gamma_star;
  const Matrix right = identity - gamma * pi.transpose() / gamma_star;
  out.correction = left * summary.deviation * right;
  return out;
}

std::vector<DiscreteSampler> jump_samplers(const Generator& chain) {
  const int d = chain.states();
  std::vector<DiscreteSampler> out;
  out.reserve(d);
  std::vector<double> weights(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) weights[j] = i == j ? 0.0 : chain.rates()(i, j);
    // An absorbing row (only possible for d = 1) never jumps.
    if (chain.exit_rate(i) <= 0.0) weights[i] = 1.0;
    out.emplace_back(weights);
  }
  return out;
}

int RegimePath::state_at(double t) const {
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  const std::size_t idx = it == jump_times.begin() ? 0 : (it - jump_times.begin()) - 1;
  return states[idx];
}

Vector RegimePath::occupation(int d) const {
  Vector time = Vector::Zero(d);
  for (std::size_t j = 0; j < states.size(); ++j) {
    const double end = j + 1 < jump_times.size() ? jump_times[j + 1] : horizon;
    time(states[j]) += end - jump_times[j];
  }
  return time;
}

RegimePath sample_regime_path(const Generator& chain, double horizon,
                              CounterRng& rng, int initial_state) {
  require(horizon > 0.0, "sample_regime_path: horizon must be positive");
  const int d = chain.states();
  require(initial_state < d, "sample_regime_path: initial state out of range");

  int state = initial_state;
  if (state < 0) {
    const Vector pi = stationary_distribution(chain);
    state = static_cast<int>(
        DiscreteSampler(std::span<const double>(pi.data(), pi.size()))(rng));
  }

  const std::vector<DiscreteSampler> jumps = jump_samplers(chain);

  RegimePath path;
  path.horizon = horizon;
  path.jump_times.push_back(0.0);
  path.states.push_back(state);
  double t = 0.0;
  for (;;) {
    const double rate = chain.exit_rate(state);
    if (rate <= 0.0) break;
    t += exponential(rng, rate);
    if (t >= horizon) break;
    state = static_cast<int>(jumps[state](rng));
    path.jump_times.push_back(t);
    path.states.push_back(state);
  }
  return path;
}

RegimePath sample_regime_path(const Generator& chain, double horizon,
                              std::uint64_t seed, int initial_state) {
  CounterRng rng(seed, 0);
  return sample_regime_path(chain, horizon, rng, initial_state);
}

}  // namespace dyner
