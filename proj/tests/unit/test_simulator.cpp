#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "dyner/errors.hpp"
#include "dyner/simulator.hpp"
#include "test_models.hpp"

using namespace dyner;
using namespace dyner::testing;

namespace {

void check_ctmc_path(const EdgeCountPath& path) {
  REQUIRE_FALSE(path.events.empty());
  for (std::size_t j = 0; j < path.events.size(); ++j) {
    const PathEvent& e = path.events[j];
    REQUIRE(e.edges >= 0);
    REQUIRE(e.edges <= path.total_edges);
    if (j == 0) continue;
    const PathEvent& prev = path.events[j - 1];
    REQUIRE(e.time > prev.time);
    const int step = std::abs(e.edges - prev.edges);
    if (path.kind == PathKind::kResampleContinuous) {
      // Regime column is the slot index; every recorded event is a jump.
      REQUIRE(step == 1);
    } else {
      // Either a regime jump (edges unchanged) or a single birth/death.
      REQUIRE(step + (e.regime != prev.regime ? 1 : 0) == 1);
    }
  }
  CHECK(path.events.back().time <= path.horizon);
}

std::vector<std::int64_t> counts_of(const std::vector<double>& ys, int n) {
  std::vector<std::int64_t> out(n + 1, 0);
  for (double y : ys) ++out[static_cast<int>(y)];
  return out;
}

// One stationary-ish observation per replication after a burn-in.
std::vector<double> observed(const TrajectoryEnsemble& ens, double t) {
  return values_at(ens, t);
}

}  // namespace

TEST_CASE("regime path validity and determinism") {
  CounterRng rng(1, 0);
  for (int trial = 0; trial < 6; ++trial) {
    const RegimeModel m = random_regime_model(2 + trial % 3, 3 + 4 * trial, rng);
    const int y0 = trial % (m.edges() + 1);
    const SimOptions opts{trial % 2 ? Scaling::kScaled : Scaling::kUnscaled};
    const EdgeCountPath a = simulate_regime_aggregate(m, 30.0, y0, {9, std::uint64_t(trial)}, opts);
    check_ctmc_path(a);
    CHECK(a.events.front().time == 0.0);
    CHECK(a.events.front().edges == y0);
    const EdgeCountPath b = simulate_regime_aggregate(m, 30.0, y0, {9, std::uint64_t(trial)}, opts);
    REQUIRE(a.events.size() == b.events.size());
    bool same = true;
    for (std::size_t j = 0; j < a.events.size(); ++j) {
      same = same && a.events[j].time == b.events[j].time &&
             a.events[j].edges == b.events[j].edges &&
             a.events[j].regime == b.events[j].regime;
    }
    CHECK(same);
    check_ctmc_path(simulate_regime_per_edge(m, 30.0, y0, {9, std::uint64_t(trial)}, opts));
  }
}

TEST_CASE("first event from an empty graph is never a death") {
  const RegimeModel m = two_regime_model(6);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const EdgeCountPath p = simulate_regime_aggregate(m, 5.0, 0, {3, s});
    REQUIRE(p.events.size() > 1);
    const PathEvent& first = p.events[1];
    CHECK((first.edges == 1 || (first.edges == 0 && first.regime != p.events[0].regime)));
  }
}

TEST_CASE("one-regime time average converges to the binomial mean") {
  const RegimeModel m = one_regime_model(1.0, 1.0, 10);
  const double horizon = 1e4;
  const EdgeCountPath p = simulate_regime_aggregate(m, horizon, 0, {17, 0});
  // Var of the time average ~ 2 Var(Y) / (gamma T) for autocorrelation e^{-gamma t}.
  const double sigma = std::sqrt(2.0 * 2.5 / 2.0 / horizon);
  CHECK(std::fabs(p.time_average(0.0, horizon) - 5.0) < 3.0 * sigma + 5.0 / horizon);
}

TEST_CASE("aggregate stationary histogram matches the analytic law") {
  const RegimeModel m = two_regime_model(5);
  const double burn = 20.0 / m.gamma_star();
  const std::vector<double> at{burn};
  const auto ens = simulate_ensemble(
      21, 20000, [&](RngStream s) {
        return simulate_regime_aggregate(m, burn, 0, s, {Scaling::kUnscaled, -1, at});
      });
  const Vector law =
      stationary_joint(m, JointMethod::kGeneratorSolve, Scaling::kUnscaled).edge_marginal();
  const std::vector<double> probs(law.data(), law.data() + law.size());
  CHECK(chi_square_goodness(counts_of(observed(ens, burn), 5), probs).p_value > 1e-3);
}

TEST_CASE("per-edge simulator") {
  // N = 1: both simulators describe one on/off edge.
  const RegimeModel single = two_regime_model(1);
  const double burn = 20.0 / single.gamma_star();
  const std::vector<double> at{burn};
  const SimOptions opts{Scaling::kUnscaled, -1, at};
  const auto agg = simulate_ensemble(
      5, 20000, [&](RngStream s) { return simulate_regime_aggregate(single, burn, 0, s, opts); });
  const auto edge = simulate_ensemble(
      6, 20000, [&](RngStream s) { return simulate_regime_per_edge(single, burn, 0, s, opts); });
  CHECK(chi_square_two_sample(counts_of(values_at(agg, burn), 1),
                              counts_of(values_at(edge, burn), 1))
            .p_value > 1e-3);

  // Given a fixed regime path, distinct edges are independent.
  const RegimeModel m = two_regime_model(2);
  const RegimePath regimes = sample_regime_path(m.chain(), 3.0, 77u);
  const double t = 2.5;
  std::vector<double> e0, e1;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    const auto toggles = simulate_edges_on_path(m, regimes, 0, CounterRng(31, s));
    int on[2] = {0, 0};
    for (const EdgeToggle& tg : toggles) {
      if (tg.time <= t) on[tg.edge] ^= 1;
    }
    e0.push_back(on[0]);
    e1.push_back(on[1]);
  }
  const CovarianceEstimate cov = sample_covariance(e0, e1);
  CHECK(std::fabs(cov.covariance) < 3.0 * cov.se);
}

TEST_CASE("discrete resampling") {
  const ResampleModel kill(TransitionLaw::deterministic(1.0, 0.0), 8);
  const EdgeCountPath p = simulate_resample_discrete(kill, 10, 8, {1, 0});
  CHECK(p.events.front().edges == 8);
  for (std::size_t j = 1; j < p.events.size(); ++j) CHECK(p.events[j].edges == 0);

  CounterRng rng(61, 0);
  const ResampleModel model(random_transition_law(3, rng), 20);
  const TransitionMoments tm = model.law.moments();
  const int burn = static_cast<int>(std::ceil(20.0 / (2.0 - tm.mean_p - tm.mean_r)));
  const std::vector<double> at{double(burn), double(burn + 1)};
  const auto ens = simulate_ensemble(8, 20000, [&](RngStream s) {
    return simulate_resample_discrete(model, burn + 1, 0, s, {Scaling::kUnscaled, -1, at});
  });
  const auto y0 = values_at(ens, burn), y1 = values_at(ens, burn + 1);
  const SampleSummary s = summarize_sample(y0);
  CHECK(std::fabs(s.mean - stationary_mean(model)) < 3.0 * s.mean_se);
  CHECK(std::fabs(s.variance - stationary_variance(model).variance) < 3.0 * s.variance_se);
  const CovarianceEstimate cov = sample_covariance(y0, y1);
  CHECK(std::fabs(cov.covariance - lag1_covariance(model)) < 3.0 * cov.se);
}

TEST_CASE("continuous resampling agrees with the embedded discrete chain") {
  const ContinuousResampleSpec spec{PairLaw::independent_uniform(0, 5, 0, 3), 0.2};
  const int n = 5, slots = 12;
  const std::vector<double> at{slots * spec.period};
  const auto cont = simulate_ensemble(41, 20000, [&](RngStream s) {
    return simulate_resample_continuous(spec, n, slots * spec.period, 2, s,
                                        {Scaling::kUnscaled, -1, at});
  });
  const ResampleModel embedded(embed_continuous(spec), n);
  const std::vector<double> slot_at{double(slots)};
  const auto disc = simulate_ensemble(42, 20000, [&](RngStream s) {
    return simulate_resample_discrete(embedded, slots, 2, s, {Scaling::kUnscaled, -1, slot_at});
  });
  CHECK(chi_square_two_sample(counts_of(values_at(cont, at[0]), n),
                              counts_of(values_at(disc, slots), n))
            .p_value > 1e-3);

  const EdgeCountPath one = simulate_resample_continuous(spec, n, 1.0, 3, {1, 1});
  CHECK(one.events.front().time == 0.0);
  CHECK(one.events.front().edges == 3);
  check_ctmc_path(one);
}

TEST_CASE("long slots decouple the edge states") {
  // With period >> 1/(Lambda + M) the slot-end states are i.i.d. given the
  // slot's rates: Y ~ mixture of Binomial(N, Lambda / (Lambda + M)).
  const ContinuousResampleSpec spec{
      PairLaw::atoms({{1.0, 3.0, 0.5}, {2.0, 2.0, 0.5}}), 40.0};
  const int n = 4;
  const std::vector<double> at{spec.period};
  const auto ens = simulate_ensemble(43, 20000, [&](RngStream s) {
    return simulate_resample_continuous(spec, n, spec.period, 0, s, {Scaling::kUnscaled, -1, at});
  });
  std::vector<double> probs(n + 1, 0.0);
  for (double q : {0.25, 0.5}) {
    for (int k = 0; k <= n; ++k) {
      probs[k] += 0.5 * std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)) *
                  std::pow(q, k) * std::pow(1.0 - q, n - k);
    }
  }
  CHECK(chi_square_goodness(counts_of(values_at(ens, spec.period), n), probs).p_value > 1e-3);
}

TEST_CASE("simulated regime moments match the closed forms") {
  CounterRng rng(71, 0);
  for (int trial = 0; trial < 3; ++trial) {
    const RegimeModel m = random_regime_model(2 + trial, 6 + 3 * trial, rng);
    const double burn = 20.0 / m.gamma_star();
    const std::vector<double> at{burn};
    const auto ens = simulate_ensemble(100 + trial, 10000, [&](RngStream s) {
      return simulate_regime_aggregate(m, burn, 0, s, {Scaling::kScaled, -1, at});
    });
    const SampleSummary s = summarize_sample(values_at(ens, burn));
    CHECK(std::fabs(s.mean - stationary_mean(m, Scaling::kScaled)) < 3.5 * s.mean_se);
    CHECK(std::fabs(s.variance - stationary_variance(m, Scaling::kScaled)) < 3.5 * s.variance_se);
  }
}

TEST_CASE("ensembles and statistics") {
  const RegimeModel m = two_regime_model(10);
  const PathTask task = [&](RngStream s) { return simulate_regime_aggregate(m, 4.0, 0, s); };
  const auto one = simulate_ensemble(5, 64, task, 1);
  const auto many = simulate_ensemble(5, 64, task, 4);
  REQUIRE(one.size() == 64);
  bool same = true;
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one.paths[i].stream.index == i);
    same = same && one.paths[i].events.size() == many.paths[i].events.size() &&
           one.paths[i].events.back().time == many.paths[i].events.back().time;
  }
  CHECK(same);

  const std::vector<double> times{1.0, 2.0, 4.0};
  const EnsembleStats stats = ensemble_stats(one, times, Normalization::moments(3.0, 2.0), 7);
  REQUIRE(stats.at.size() == 3);
  CHECK(std::isnan(stats.at[0].lag1_cov));
  for (const TimeStats& ts : stats.at) {
    std::int64_t mass = 0, norm_mass = 0;
    for (const auto& b : ts.y_histogram) mass += b.count;
    for (const auto& b : ts.normalized_histogram) norm_mass += b.count;
    CHECK(mass == 64);
    CHECK(norm_mass == 64);
    CHECK(ts.normalized_histogram.size() == 7);
  }
  CHECK(stats.at[1].normalized[0] == doctest::Approx((values_at(one, 2.0)[0] - 3.0) / std::sqrt(2.0)));

  // Identical deterministic paths have zero variance.
  const ResampleModel frozen(TransitionLaw::deterministic(1.0, 1.0), 4);
  const auto fixed = simulate_ensemble(1, 10, [&](RngStream s) {
    return simulate_resample_discrete(frozen, 3, 2, s);
  });
  const std::vector<double> slot{2.0};
  CHECK(ensemble_stats(fixed, slot, std::nullopt).at[0].summary.variance == 0.0);

  TrajectoryEnsemble lonely;
  lonely.paths.push_back(fixed.paths[0]);
  try {
    ensemble_stats(lonely, slot, std::nullopt);
    FAIL("expected InsufficientReplications");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientReplications);
  }
}

TEST_CASE("csv output") {
  const ResampleModel kill(TransitionLaw::deterministic(1.0, 0.0), 3);
  std::ostringstream out;
  write_path_csv(out, simulate_resample_discrete(kill, 2, 3, {1, 0}));
  CHECK(out.str().rfind("time,regime,Y\n0,-1,3\n", 0) == 0);

  std::ostringstream hist;
  const std::vector<HistogramBin> bins{{-0.5, 0.5, 4}};
  write_histogram_csv(hist, bins);
  CHECK(hist.str() == "bin_lo,bin_hi,count\n-0.5,0.5,4\n");
}
