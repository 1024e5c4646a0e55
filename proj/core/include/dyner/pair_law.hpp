#ifndef DYNER_PAIR_LAW_HPP
#define DYNER_PAIR_LAW_HPP

#include <optional>
#include <utility>
#include <vector>

#include "dyner/rng.hpp"

namespace dyner {

struct PairAtom {
  double a = 0.0;
  double b = 0.0;
  double weight = 1.0;
};

/// Raw and mixed moments of a pair (A, B).
struct PairMoments {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double second_a = 0.0;  // E A^2
  double second_b = 0.0;  // E B^2
  double cross = 0.0;     // E AB

  double var_a() const { return second_a - mean_a * mean_a; }
  double var_b() const { return second_b - mean_b * mean_b; }
  double cov() const { return cross - mean_a * mean_b; }
};

/// log E exp(sA + tB) and its first and second partial derivatives.
struct LogMgf {
  double value = 0.0;
  double ds = 0.0, dt = 0.0;
  double dss = 0.0, dst = 0.0, dtt = 0.0;
};

/// Joint law of a nonnegative pair: either a finite weighted mixture of atoms
/// or independent uniforms A ~ U[a_lo, a_hi], B ~ U[b_lo, b_hi].  Used for
/// (eta, zeta) in the scaled resampling law and for (Lambda, M) in the
/// continuous-time resampling model.
class PairLaw {
 public:
  /// Weights must be positive and sum to 1 within 1e-12.
  static PairLaw atoms(std::vector<PairAtom> atoms);
  static PairLaw point(double a, double b) { return atoms({{a, b, 1.0}}); }
  static PairLaw independent_uniform(double a_lo, double a_hi, double b_lo,
                                     double b_hi);

  bool is_uniform() const { return uniform_; }
  const std::vector<PairAtom>& atom_list() const { return atoms_; }
  std::pair<double, double> range_a() const { return {a_lo_, a_hi_}; }
  std::pair<double, double> range_b() const { return {b_lo_, b_hi_}; }

  PairMoments moments() const;

  /// Atoms unchanged; uniforms become an n x n tensor Gauss-Legendre grid.
  std::vector<PairAtom> discretize(int nodes = 64) const;

  std::pair<double, double> sample(CounterRng& rng) const;

  /// Finite for all (s, t) since both families are bounded.
  LogMgf log_mgf(double s, double t) const;

  /// The law of (B, A).
  PairLaw swapped() const;

 private:
  PairLaw() = default;

  bool uniform_ = false;
  std::vector<PairAtom> atoms_;
  std::optional<DiscreteSampler> picker_;
  double a_lo_ = 0.0, a_hi_ = 0.0, b_lo_ = 0.0, b_hi_ = 0.0;
};

}  // namespace dyner

#endif  // DYNER_PAIR_LAW_HPP
