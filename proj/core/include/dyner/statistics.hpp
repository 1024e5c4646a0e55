#ifndef DYNER_STATISTICS_HPP
#define DYNER_STATISTICS_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace dyner {

double normal_cdf(double z);

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  /// Standard error of `mean` and of `variance` (the latter from the sample
  /// fourth central moment).
  double mean_se = 0.0;
  double variance_se = 0.0;
};

SampleSummary summarize_sample(std::span<const double> xs);

/// Unbiased sample covariance and the standard error of that estimate.
struct CovarianceEstimate {
  double covariance = 0.0;
  double se = 0.0;
};

CovarianceEstimate sample_covariance(std::span<const double> xs,
                                     std::span<const double> ys);

/// Kolmogorov-Smirnov distance between the empirical law of `xs` and
/// Normal(mean, sd^2).
double ks_normal(std::span<const double> xs, double mean, double sd);

/// KS distance for samples supported on the lattice {origin + k * step}
/// against Normal(mean, sd^2) with continuity correction: the empirical CDF at
/// each lattice point x is compared with Phi((x + step/2 - mean) / sd).
double ks_normal_lattice(std::span<const double> xs, double origin, double step,
                         double mean, double sd);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Two-sample chi-square homogeneity test on paired category counts.
/// Adjacent categories are pooled until each pooled cell holds at least
/// `min_pooled` observations in total.
ChiSquareResult chi_square_two_sample(std::span<const std::int64_t> a,
                                      std::span<const std::int64_t> b,
                                      double min_pooled = 10.0);

/// Goodness of fit of observed counts against category probabilities.
/// Cells with expected count below `min_expected` are pooled.
ChiSquareResult chi_square_goodness(std::span<const std::int64_t> observed,
                                    std::span<const double> probabilities,
                                    double min_expected = 5.0);

double chi_square_survival(double statistic, int dof);

/// Freedman-Diaconis bin count for `xs` (at least 1).
int freedman_diaconis_bins(std::span<const double> xs);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::int64_t count = 0;
};

/// Equal-width histogram over [min, max] of `xs` (last bin closed).
std::vector<HistogramBin> histogram(std::span<const double> xs, int bins);

/// Unit-width bins [k - 1/2, k + 1/2) for integer-valued data.
std::vector<HistogramBin> integer_histogram(std::span<const double> xs);

}  // namespace dyner

#endif  // DYNER_STATISTICS_HPP
