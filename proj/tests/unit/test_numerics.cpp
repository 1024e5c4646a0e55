#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "dyner/errors.hpp"
#include "dyner/quadrature.hpp"
#include "dyner/statistics.hpp"

using namespace dyner;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const QuadratureRule rule = gauss_legendre(8, -1.0, 2.0);
  double total = 0.0, p15 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    total += rule.weights[i];
    p15 += rule.weights[i] * std::pow(rule.nodes[i], 15);
  }
  CHECK(total == doctest::Approx(3.0).epsilon(1e-14));
  // int_{-1}^{2} x^15 dx = (2^16 - 1) / 16
  CHECK(p15 == doctest::Approx((65536.0 - 1.0) / 16.0).epsilon(1e-12));
}

TEST_CASE("adaptive simpson on smooth and peaked integrands") {
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0,
                         std::numbers::pi) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(adaptive_simpson([](double x) { return std::exp(-200.0 * x * x); }, -1.0,
                         1.0, 1e-12) ==
        doctest::Approx(std::sqrt(std::numbers::pi / 200.0)).epsilon(1e-9));
  CHECK(adaptive_simpson([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("normal cdf reference values") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(normal_cdf(-3.0) == doctest::Approx(0.0013498980316301).epsilon(1e-10));
}

TEST_CASE("summary and covariance on a fixed sample") {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  const std::vector<double> ys{2, 4, 5, 4, 5};
  const SampleSummary s = summarize_sample(xs);
  CHECK(s.count == 5);
  CHECK(s.mean == doctest::Approx(3.0));
  CHECK(s.variance == doctest::Approx(2.5));
  CHECK(s.mean_se == doctest::Approx(std::sqrt(2.5 / 5.0)));
  CHECK(sample_covariance(xs, ys).covariance == doctest::Approx(1.5));
}

TEST_CASE("ks distance of a known sample") {
  // Empirical CDF of {0} against N(0, 1): jumps from 0 to 1 at 0.
  const std::vector<double> one{0.0};
  CHECK(ks_normal(one, 0.0, 1.0) == doctest::Approx(0.5));
  // Lattice version compares with Phi(0.5) at the single point.
  CHECK(ks_normal_lattice(one, 0.0, 1.0, 0.0, 1.0) ==
        doctest::Approx(1.0 - normal_cdf(0.5)).epsilon(1e-12));
}

TEST_CASE("chi-square survival reference values") {
  CHECK(chi_square_survival(3.841458820694124, 1) ==
        doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi_square_survival(23.20925115532, 10) ==
        doctest::Approx(0.01).epsilon(1e-8));
  CHECK(chi_square_survival(0.0, 4) == doctest::Approx(1.0));
}

TEST_CASE("chi-square tests accept identical and reject disjoint samples") {
  const std::vector<std::int64_t> a{100, 200, 300, 400};
  CHECK(chi_square_two_sample(a, a).p_value == doctest::Approx(1.0));
  const std::vector<std::int64_t> b{400, 300, 200, 100};
  CHECK(chi_square_two_sample(a, b).p_value < 1e-10);
  const std::vector<double> probs{0.1, 0.2, 0.3, 0.4};
  const ChiSquareResult fit = chi_square_goodness(a, probs);
  CHECK(fit.statistic == doctest::Approx(0.0));
  CHECK(fit.dof == 3);
}

TEST_CASE("histograms") {
  const std::vector<double> xs{0, 0, 1, 2, 2, 2};
  const auto ints = integer_histogram(xs);
  REQUIRE(ints.size() == 3);
  CHECK(ints[0].lo == doctest::Approx(-0.5));
  CHECK(ints[0].count == 2);
  CHECK(ints[1].count == 1);
  CHECK(ints[2].count == 3);

  const auto bins = histogram(xs, 2);
  REQUIRE(bins.size() == 2);
  CHECK(bins[0].count + bins[1].count == 6);
  CHECK(bins[1].hi == doctest::Approx(2.0));
  CHECK(freedman_diaconis_bins(xs) >= 1);
}

TEST_CASE("error codes have stable names") {
  CHECK(to_string(ErrorCode::kReducible) == "Reducible");
  CHECK(to_string(ErrorCode::kConfigInvalid) == "ConfigInvalid");
  try {
    require(false, "boom");
    FAIL("require did not throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
  }
}
