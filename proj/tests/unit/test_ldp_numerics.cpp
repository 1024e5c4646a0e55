#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dyner/errors.hpp"
#include "dyner/ldp_numerics.hpp"
#include "dyner/simulator.hpp"
#include "test_models.hpp"

using namespace dyner;
using namespace dyner::testing;

namespace {

Vector simplex_point(int d, CounterRng& rng) {
  Vector g(d);
  for (int i = 0; i < d; ++i) g(i) = exponential(rng, 1.0) + 1e-3;
  return g / g.sum();
}

// sup over theta in [-20, 20] on a 1e-4 grid, refined by a 3-point parabola.
double grid_rate(const std::function<double(double)>& cumulant, double y) {
  double best = -std::numeric_limits<double>::infinity(), arg = 0.0;
  for (int k = -200000; k <= 200000; ++k) {
    const double theta = k * 1e-4;
    const double value = theta * y - cumulant(theta);
    if (value > best) {
      best = value;
      arg = theta;
    }
  }
  const double h = 1e-4;
  const double fm = (arg - h) * y - cumulant(arg - h);
  const double fp = (arg + h) * y - cumulant(arg + h);
  const double curvature = fp - 2.0 * best + fm;
  if (curvature < 0.0) best -= (fp - fm) * (fp - fm) / (8.0 * curvature);
  return best;
}

PathFunction mean_regime_path(const RegimeModel& m, double x0, double horizon,
                              int segments) {
  PathFunction f{horizon, {}};
  for (int j = 0; j <= segments; ++j) {
    const double t = horizon * j / segments;
    f.values.push_back(m.rho_bar() + (x0 - m.rho_bar()) * std::exp(-m.gamma_star() * t));
  }
  return f;
}

}  // namespace

TEST_CASE("regime cumulant") {
  const RegimeModel m = two_regime_model(10);
  const Vector g = m.summary().pi;
  CHECK(cumulant_regime(0.3, g, 0.0, m) == 0.0);
  CHECK(cumulant_regime(0.3, g, 0.0, m, CumulantConvention::kBirthsOnOccupied) == 0.0);

  // Derivative at 0 under each placement of x.
  const double x = 0.3;
  const Vector lam = m.lambda(), mu = m.mu();
  const double occupied_drift = g.dot(x * lam - (1.0 - x) * mu);
  const double vacant = g.dot((1.0 - x) * lam - x * mu);
  CHECK(regime_cumulant(x, g, m, CumulantConvention::kBirthsOnOccupied)(0.0).d1 ==
        doctest::Approx(occupied_drift).epsilon(1e-14));
  CHECK(regime_cumulant(x, g, m)(0.0).d1 == doctest::Approx(vacant).epsilon(1e-14));

  CounterRng rng(1, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const RegimeModel r = random_regime_model(2 + trial % 3, 5, rng);
    const Vector gr = simplex_point(r.regimes(), rng);
    const double xr = uniform01(rng);
    const double t1 = draw(rng, -4, 4), t2 = draw(rng, -4, 4);
    for (auto conv : {CumulantConvention::kBirthsOnVacant, CumulantConvention::kBirthsOnOccupied}) {
      const double mid = cumulant_regime(xr, gr, 0.5 * (t1 + t2), r, conv);
      CHECK(mid <= 0.5 * (cumulant_regime(xr, gr, t1, r, conv) +
                          cumulant_regime(xr, gr, t2, r, conv)) + 1e-12);
    }
  }
}

TEST_CASE("regime local rate") {
  CounterRng rng(2, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const RegimeModel r = random_regime_model(2, 5, rng);
    const Vector g = simplex_point(2, rng);
    const double x = draw(rng, 0.05, 0.95);
    const RegimeCumulant c = regime_cumulant(x, g, r);
    CHECK(std::fabs(local_rate_regime(x, g, c.drift(), r).rate) < 1e-10);
    const double y = c.drift() + draw(rng, -1.0, 1.0);
    const LocalRate lr = local_rate_regime(x, g, y, r);
    CHECK(lr.rate >= 0.0);
    CHECK(lr.rate == doctest::Approx(grid_rate([&](double t) { return c(t).value; }, y))
                         .epsilon(1e-6).scale(1.0));
    // Convex in y.
    const double y2 = c.drift() + draw(rng, -1.0, 1.0);
    CHECK(local_rate_regime(x, g, 0.5 * (y + y2), r).rate <=
          0.5 * (lr.rate + local_rate_regime(x, g, y2, r).rate) + 1e-10);
  }

  // Empty graph: no deaths, so negative velocities are impossible.
  const RegimeModel m = two_regime_model(10);
  const Vector pi = m.summary().pi;
  const LocalRate down = local_rate_regime(0.0, pi, -0.1, m);
  CHECK(std::isinf(down.rate));
  CHECK_FALSE(down.finite_maximizer);
  // Zero velocity at x = 0 is the limit theta -> -inf: rate = A.
  const LocalRate still = local_rate_regime(0.0, pi, 0.0, m);
  CHECK(still.rate == doctest::Approx(m.lambda_star()).epsilon(1e-10));
  CHECK_FALSE(still.finite_maximizer);
}

TEST_CASE("legendre round trip") {
  CounterRng rng(3, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const RegimeModel r = random_regime_model(3, 5, rng);
    const Vector g = simplex_point(3, rng);
    const double x = draw(rng, 0.05, 0.95);
    const double theta0 = draw(rng, -3.0, 3.0);
    const RegimeCumulant c = regime_cumulant(x, g, r);
    const CumulantValue at = c(theta0);
    const LocalRate lr = legendre_transform(c, c.tails(), at.d1);
    CHECK(lr.rate == doctest::Approx(theta0 * at.d1 - at.value).epsilon(1e-8).scale(1.0));
    CHECK(lr.theta == doctest::Approx(theta0).epsilon(1e-6));
  }
}

TEST_CASE("occupation cost density") {
  const RegimeModel m = two_regime_model(10);
  CHECK(std::fabs(occupation_cost_density(m.summary().pi, m)) < 1e-8);
  CHECK(occupation_cost_density(Vector::Ones(1), one_regime_model(1, 1, 3)) == 0.0);

  // Two states: (sqrt(g1 q12) - sqrt(g2 q21))^2.
  for (double g1 : {0.05, 0.3, 0.6, 0.9}) {
    Vector g(2);
    g << g1, 1.0 - g1;
    const double exact = std::pow(std::sqrt(2.0 * g1) - std::sqrt(3.0 * (1.0 - g1)), 2);
    CHECK(occupation_cost_density(g, m) == doctest::Approx(exact).epsilon(1e-9).scale(1.0));
    CHECK(occupation_cost_density_ratio_search(g, m) ==
          doctest::Approx(exact).epsilon(1e-9).scale(1.0));
  }

  // Supremum: never below the objective at random u.
  CounterRng rng(4, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const RegimeModel r = random_regime_model(3 + trial % 2, 4, rng);
    const int d = r.regimes();
    const Vector g = simplex_point(d, rng);
    const double sup = occupation_cost_density(g, r);
    CHECK(sup >= 0.0);
    CHECK(std::fabs(occupation_cost_density(r.summary().pi, r)) < 1e-8);
    for (int probe = 0; probe < 50; ++probe) {
      const Vector u = Vector::NullaryExpr(d, [&] { return draw(rng, 0.1, 10.0); });
      const Vector qu = r.chain().rates() * u;
      double value = 0.0;
      for (int i = 0; i < d; ++i) value -= g(i) * qu(i) / u(i);
      CHECK(value <= sup + 1e-9);
    }
  }
}

TEST_CASE("resample cumulant and rate") {
  const ScaledResampleLaw point(PairLaw::point(1.5, 0.5));
  for (double x : {0.0, 0.4, 1.0}) {
    for (double t : {-1.0, 0.0, 0.7}) {
      CHECK(cumulant_resample(x, t, point) ==
            doctest::Approx(x * 0.5 * std::expm1(-t) + (1 - x) * 1.5 * std::expm1(t))
                .epsilon(1e-13).scale(1.0));
    }
  }
  const ScaledResampleLaw law = uniform_rate_law();
  CHECK(cumulant_resample(0.3, 0.0, law) == 0.0);
  // x = 0: log E exp(eta (e^t - 1)) for eta ~ U[0, 5].
  const double c = 5.0 * std::expm1(0.4);
  CHECK(cumulant_resample(0.0, 0.4, law) ==
        doctest::Approx(std::log(std::expm1(c) / c)).epsilon(1e-12));

  CounterRng rng(5, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const double x = draw(rng, 0.02, 0.98);
    const double mean = (1.0 - x) * 2.5 - x * 1.5;
    CHECK(std::fabs(local_rate_resample(x, mean, law).rate) < 1e-10);
    const double y = mean + draw(rng, -2.0, 2.0);
    const double rate = local_rate_resample(x, y, law).rate;
    CHECK(rate >= 0.0);
    CHECK(rate == doctest::Approx(grid_rate([&](double t) { return cumulant_resample(x, t, law); }, y))
                      .epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("path costs") {
  const RegimeModel m = two_regime_model(10);
  const PathFunction mean = mean_regime_path(m, 0.1, 2.0, 400);
  const auto pi_profile = OccupationProfile::constant(m.summary().pi, 401);
  CHECK(path_cost(mean, m, pi_profile) < 1e-5);

  const ScaledResampleLaw law = uniform_rate_law();
  const PathFunction flat{1.5, std::vector<double>(7, 0.3)};
  const PathFunction flat2{3.0, std::vector<double>(7, 0.3)};
  const double i0 = local_rate_resample(0.3, 0.0, law).rate;
  CHECK(i0 > 0.0);
  CHECK(path_cost(flat, law) == doctest::Approx(1.5 * i0).epsilon(1e-12));
  CHECK(path_cost(flat2, law) == doctest::Approx(2.0 * path_cost(flat, law)).epsilon(1e-12));

  // Reaching the empty graph with negative velocity is impossible: the
  // integrand at x = 0 is +inf.
  const PathFunction falling{1.0, {0.1, 0.0}};
  CHECK(std::isinf(path_cost(falling, law)));
  CHECK(std::isinf(path_cost(falling, m, OccupationProfile::constant(m.summary().pi, 2))));
  const PathFunction rising{1.0, {0.0, 0.1}};
  CHECK(std::isfinite(path_cost(rising, law)));
}

TEST_CASE("profile minimization") {
  const RegimeModel m = two_regime_model(10);
  const PathFunction mean = mean_regime_path(m, 0.1, 2.0, 40);
  const ProfileMinimum best = minimize_over_profiles(mean, m, 50);
  CHECK(best.cost < 1e-3);
  for (const Vector& g : best.g_star.g) CHECK(g(0) == doctest::Approx(0.6).epsilon(0.05));

  const PathFunction fast{1.0, {0.1, 0.4, 0.7, 0.75, 0.8}};
  const double pi_cost = path_cost(fast, m, OccupationProfile::constant(m.summary().pi, 5));
  const ProfileMinimum coarse = minimize_over_profiles(fast, m, 10);
  const ProfileMinimum fine = minimize_over_profiles(fast, m, 20);
  CHECK(coarse.cost <= pi_cost + 1e-12);
  CHECK(fine.cost <= coarse.cost + 1e-12);

  Matrix q(3, 3);
  q << -2, 1, 1, 1, -2, 1, 1, 1, -2;
  const RegimeModel three(validate_generator(q), Vector::Ones(3), Vector::Ones(3), 5);
  try {
    minimize_over_profiles(fast, three, 10);
    FAIL("expected UnsupportedDimension");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupportedDimension);
  }
}

TEST_CASE("large-deviation trend for the resampling model") {
  // P(Y(T)/N >= a) ~ exp(-N inf I_T); the gap to the numerical inf shrinks
  // as N doubles.
  const ScaledResampleLaw law = uniform_rate_law();
  const double x0 = 0.5, a = 0.75, horizon = 1.0;
  const double cost = minimize_endpoint_cost(law, x0, a, horizon, 8).cost;
  CHECK(cost > 0.0);
  std::vector<double> gaps;
  for (int n : {20, 40, 80}) {
    const ResampleModel model(law.discrete_law(n), n);
    const int slots = static_cast<int>(n * horizon);
    const std::vector<double> at{double(slots)};
    const auto ens = simulate_ensemble(500 + n, 200000, [&](RngStream s) {
      return simulate_resample_discrete(model, slots, n / 2, s, {Scaling::kUnscaled, -1, at});
    });
    std::int64_t hits = 0;
    for (double y : values_at(ens, slots)) hits += y >= a * n;
    REQUIRE(hits > 0);
    const double estimate = -std::log(double(hits) / ens.size()) / n;
    MESSAGE("N=" << n << " -log(p)/N=" << estimate << " inf I=" << cost);
    gaps.push_back(std::fabs(estimate - cost));
  }
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[2] < gaps[1]);
}

TEST_CASE("ldp csv") {
  std::ostringstream out;
  write_rate_table_csv(out, uniform_rate_law(), {0.5}, {0.25});
  CHECK(out.str().rfind("x,y,rate\n0.5,0.25,", 0) == 0);
  const RegimeModel m = two_regime_model(10);
  std::ostringstream prof;
  write_profile_csv(prof, PathFunction{1.0, {0.2, 0.3}}, m,
                    OccupationProfile::constant(m.summary().pi, 2));
  std::istringstream in(prof.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "s,g1,g2,integrand");
  double s0 = 1, g1 = 0, g2 = 0;
  char comma;
  std::istringstream(row) >> s0 >> comma >> g1 >> comma >> g2;
  CHECK(s0 == 0.0);
  CHECK(g1 == doctest::Approx(0.6));
  CHECK(g2 == doctest::Approx(0.4));
}
