#ifndef DYNER_DIFFUSION_LIMIT_HPP
#define DYNER_DIFFUSION_LIMIT_HPP

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "dyner/regime_analytics.hpp"
#include "dyner/resample_analytics.hpp"
#include "dyner/rng.hpp"
#include "dyner/simulator.hpp"

namespace dyner {

/// Which noise sources survive in the limit.  With background speed-up
/// exponent delta, delta < 1 leaves only the environment term g' and
/// delta > 1 only the Poisson term h'.
enum class NoiseSelection { kBoth, kEnvironmentOnly, kPoissonOnly };

NoiseSelection noise_selection_for(double delta);

/// Limit dZ = -rate Z dt + sqrt(g'(t) + h'(t)) dB, Z(0) = 0, of the centred
/// and scaled edge count (Y(t) - N rho(t)) / sqrt(N) from an empty start.
struct DiffusionSpec {
  double rate = 0.0;  // gamma* (regime) or E Gamma (resampling)
  double rho_bar = 0.0;
  double v = 0.0;
  std::function<double(double)> g_prime;
  std::function<double(double)> h_prime;
  NoiseSelection selection = NoiseSelection::kBoth;

  double rho(double t) const;
  /// The selected g'(t) + h'(t).
  double noise(double t) const;
  /// lim noise(t); equals 2 rate (rho (1 - rho) + v) under kBoth.
  double noise_at_infinity() const;
};

/// rho(t) = rho_bar (1 - e^{-gamma* t}).
double rho_t(const RegimeModel& model, double t);
/// rho(t) = rho_bar (1 - e^{-t E Gamma}).
double rho_t(const ScaledResampleLaw& law, double t);

/// g'(t) = 2 pi^T (Lambda - rho(t) Gamma) D (Lambda - rho(t) Gamma) 1,
/// h'(t) = lambda* (1 - rho(t)) + mu* rho(t).
DiffusionSpec build_diffusion_spec(const RegimeModel& model);

/// g'(t) = Var(Lambda - rho(t) Gamma),
/// h'(t) = E Lambda (1 - rho(t)) + E M rho(t), with (Lambda, M) = (eta, zeta).
DiffusionSpec build_diffusion_spec(const ScaledResampleLaw& law);

/// sigma^2(t) = int_0^t e^{-2 rate (t - s)} (g'(s) + h'(s)) ds; t = +inf
/// returns the stationary value (g'(inf) + h'(inf)) / (2 rate).
double fluctuation_variance(const DiffusionSpec& spec, double t);

struct OuPath {
  std::vector<double> times;
  std::vector<double> values;
};

struct OuOptions {
  double dt = 1e-3;
  /// Empty: keep every step.  Otherwise the values at these sorted times.
  std::vector<double> observe_times;
};

/// Euler-Maruyama from Z(0) = 0.  Throws StepTooLarge when dt * rate >= 0.1.
OuPath simulate_ou(const DiffusionSpec& spec, double horizon,
                   const OuOptions& options, RngStream stream);

struct FcltDiscrepancy {
  /// KS distance of Ybar(t) against Normal(0, sigma^2(t)), with continuity
  /// correction for the lattice {(k - N rho(t)) / sqrt(N)}.
  double ks = 0.0;
  /// Same distance without the correction.
  double ks_raw = 0.0;
  /// Sample variance of Ybar(t) over sigma^2(t).
  double var_ratio = 0.0;
};

/// Compares an ensemble simulated at size `edges` (delta = 1 scaling) to the
/// limit at time t.  Throws InsufficientReplications.
FcltDiscrepancy fclt_discrepancy(const TrajectoryEnsemble& ensemble,
                                 const DiffusionSpec& spec, int edges, double t);

void write_diffusion_csv(std::ostream& out, const DiffusionSpec& spec,
                         std::span<const double> times);
/// Same columns as edge-count paths, with the regime column fixed to -1.
void write_ou_csv(std::ostream& out, const OuPath& path);

}  // namespace dyner

#endif  // DYNER_DIFFUSION_LIMIT_HPP
