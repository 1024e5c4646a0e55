#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "dyner/diffusion_limit.hpp"
#include "dyner/errors.hpp"
#include "test_models.hpp"

using namespace dyner;
using namespace dyner::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SampleSummary ou_summary(const DiffusionSpec& spec, double t, double dt,
                         std::uint64_t seed, int paths) {
  OuOptions opts;
  opts.dt = dt;
  opts.observe_times = {t};
  std::vector<double> z;
  for (int i = 0; i < paths; ++i) {
    z.push_back(simulate_ou(spec, t, opts, {seed, std::uint64_t(i)}).values.front());
  }
  return summarize_sample(z);
}

}  // namespace

TEST_CASE("fluid limit") {
  const ScaledResampleLaw law = uniform_rate_law();
  CHECK(rho_t(law, 0.0) == 0.0);
  CHECK(rho_t(law, std::log(2.0) / 4.0) == doctest::Approx(0.3125).epsilon(1e-14));
  CHECK(rho_t(law, 1e3) == doctest::Approx(0.625));
  const RegimeModel m = two_regime_model(45);
  CHECK(rho_t(m, 0.0) == 0.0);
  CHECK(rho_t(m, 100.0) == doctest::Approx(m.rho_bar()));
  CHECK(build_diffusion_spec(m).rho(0.7) == doctest::Approx(rho_t(m, 0.7)));
  CHECK_THROWS_AS(rho_t(m, -1.0), Error);
}

TEST_CASE("noise terms at stationarity") {
  const RegimeModel one = one_regime_model(0.6, 1.4, 20);
  const DiffusionSpec s1 = build_diffusion_spec(one);
  for (double t : {0.0, 0.3, 5.0, kInf}) CHECK(std::fabs(s1.g_prime(t)) < 1e-15);
  CHECK(s1.h_prime(kInf) == doctest::Approx(2.0 * 2.0 * 0.3 * 0.7).epsilon(1e-14));

  const DiffusionSpec b = build_diffusion_spec(uniform_rate_law());
  CHECK(b.g_prime(kInf) == doctest::Approx(0.375 * 0.375 * 25.0 / 12.0 + 0.625 * 0.625 * 0.75).epsilon(1e-12));
  CHECK(b.g_prime(kInf) == doctest::Approx(0.58594).epsilon(1e-5));
  CHECK(b.h_prime(kInf) == doctest::Approx(1.875).epsilon(1e-14));

  CounterRng rng(90, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const RegimeModel m = random_regime_model(2 + trial % 3, 10, rng);
    const DiffusionSpec s = build_diffusion_spec(m);
    const VarianceExpansion e = scaled_variance_expansion(m);
    CHECK(std::fabs(s.g_prime(kInf) - 2.0 * s.rate * e.v) < 1e-10);
    CHECK(std::fabs(s.h_prime(kInf) - 2.0 * s.rate * e.rho_bar * (1.0 - e.rho_bar)) < 1e-10);

    const ScaledResampleLaw law(random_pair_law(1 + trial % 4, rng));
    const DiffusionSpec r = build_diffusion_spec(law);
    const ScaledMoments sm = scaled_moments(law);
    CHECK(std::fabs(r.g_prime(kInf) - 2.0 * r.rate * sm.v) < 1e-10);
    CHECK(std::fabs(r.h_prime(kInf) - 2.0 * r.rate * sm.rho_bar * (1.0 - sm.rho_bar)) < 1e-10);
    for (double t : {0.0, 0.2, 1.0, 10.0}) {
      CHECK(s.g_prime(t) >= 0.0);
      CHECK(s.h_prime(t) >= 0.0);
      CHECK(r.g_prime(t) >= 0.0);
      CHECK(r.h_prime(t) >= 0.0);
    }
  }
}

TEST_CASE("fluctuation variance") {
  const RegimeModel m = two_regime_model(45);
  const DiffusionSpec spec = build_diffusion_spec(m);
  CHECK(fluctuation_variance(spec, 0.0) == 0.0);
  CHECK(fluctuation_variance(spec, kInf) ==
        doctest::Approx(scaled_variance_expansion(m).linear_coefficient()).epsilon(1e-12));
  CHECK(fluctuation_variance(spec, 60.0) ==
        doctest::Approx(fluctuation_variance(spec, kInf)).epsilon(1e-9));

  double previous = 0.0;
  const double top = fluctuation_variance(spec, kInf);
  for (double t = 0.1; t < 8.0; t += 0.3) {
    const double s2 = fluctuation_variance(spec, t);
    CHECK(s2 >= previous - 1e-12);
    CHECK(s2 <= top + 1e-12);
    previous = s2;
  }

  // One regime from empty: Y(t) ~ Binomial(N, rho(t)), so Var / N = rho (1 - rho).
  const RegimeModel one = one_regime_model(0.4, 1.1, 8);
  const DiffusionSpec s1 = build_diffusion_spec(one);
  for (double t : {0.1, 0.5, 2.0}) {
    const JointDistribution p = transient_distribution(one, 0, Vector(), t, Scaling::kUnscaled);
    CHECK(fluctuation_variance(s1, t) == doctest::Approx(p.variance() / 8.0).epsilon(1e-7));
  }
}

TEST_CASE("noise selection by speed-up exponent") {
  CHECK(noise_selection_for(0.5) == NoiseSelection::kEnvironmentOnly);
  CHECK(noise_selection_for(1.0) == NoiseSelection::kBoth);
  CHECK(noise_selection_for(2.0) == NoiseSelection::kPoissonOnly);
  for (double t : {0.0, 0.8, kInf}) {
    const DiffusionSpec slow = build_diffusion_spec(two_regime_model(45, 0.5));
    const DiffusionSpec fast = build_diffusion_spec(two_regime_model(45, 2.0));
    CHECK(slow.noise(t) == slow.g_prime(t));
    CHECK(fast.noise(t) == fast.h_prime(t));
    const DiffusionSpec slow_b = build_diffusion_spec(uniform_rate_law(0.5));
    CHECK(slow_b.noise(t) == slow_b.g_prime(t));
  }
}

TEST_CASE("ou simulation") {
  DiffusionSpec quiet;
  quiet.rate = 1.0;
  quiet.g_prime = [](double) { return 0.0; };
  quiet.h_prime = [](double) { return 0.0; };
  const OuPath flat = simulate_ou(quiet, 2.0, {}, {1, 0});
  for (double z : flat.values) CHECK(z == 0.0);
  CHECK(flat.times.back() == doctest::Approx(2.0));

  try {
    simulate_ou(quiet, 1.0, {0.2, {}}, {1, 0});
    FAIL("expected StepTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kStepTooLarge);
  }

  const RegimeModel m = two_regime_model(45);
  const DiffusionSpec spec = build_diffusion_spec(m);
  const double dt = 0.005 / spec.rate;
  const SampleSummary a = ou_summary(spec, 10.0, dt, 11, 10000);
  const double target = fluctuation_variance(spec, kInf);
  CHECK(std::fabs(a.variance - target) < 3.0 * a.variance_se);
  CHECK(std::fabs(a.mean) < 3.0 * a.mean_se);

  // Halving dt moves the variance by less than the Monte Carlo error.
  const SampleSummary b = ou_summary(spec, 10.0, dt / 2.0, 12, 10000);
  CHECK(std::fabs(a.variance - b.variance) <
        3.0 * std::hypot(a.variance_se, b.variance_se));

  // Stationary autocorrelation at lag tau is e^{-rate tau}.
  const double tau = 0.5;
  OuOptions opts;
  opts.dt = dt;
  opts.observe_times = {10.0, 10.0 + tau};
  std::vector<double> z0, z1;
  for (int i = 0; i < 10000; ++i) {
    const OuPath p = simulate_ou(spec, 10.0 + tau, opts, {13, std::uint64_t(i)});
    z0.push_back(p.values[0]);
    z1.push_back(p.values[1]);
  }
  const CovarianceEstimate cov = sample_covariance(z0, z1);
  const double var0 = summarize_sample(z0).variance;
  CHECK(std::fabs(cov.covariance / var0 - std::exp(-spec.rate * tau)) <
        3.0 * cov.se / var0 + 3.0 * a.variance_se / target);
}

TEST_CASE("fclt discrepancy") {
  const ScaledResampleLaw law = uniform_rate_law();
  const DiffusionSpec spec = build_diffusion_spec(law);
  const ResampleModel frozen(TransitionLaw::deterministic(1.0, 1.0), 45);
  const auto ens = simulate_ensemble(1, 50, [&](RngStream s) {
    return simulate_resample_discrete(frozen, 3, 20, s);
  });
  const FcltDiscrepancy d = fclt_discrepancy(ens, spec, 45, 2.0);
  CHECK(d.ks > 0.4);
  CHECK(d.var_ratio < 1e-20);

  TrajectoryEnsemble lonely;
  lonely.paths.push_back(ens.paths[0]);
  CHECK_THROWS_AS(fclt_discrepancy(lonely, spec, 45, 2.0), Error);
}

TEST_CASE("diffusion csv") {
  const DiffusionSpec spec = build_diffusion_spec(uniform_rate_law());
  std::ostringstream out;
  const std::vector<double> times{0.0};
  write_diffusion_csv(out, spec, times);
  CHECK(out.str().rfind("t,rho,gprime,hprime,sigma2\n0,0,", 0) == 0);
  std::ostringstream ou;
  write_ou_csv(ou, OuPath{{0.0, 0.5}, {0.0, 0.25}});
  CHECK(ou.str() == "time,regime,Y\n0,-1,0\n0.5,-1,0.25\n");
}
