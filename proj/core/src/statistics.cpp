#include "dyner/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "dyner/errors.hpp"

namespace dyner {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

SampleSummary summarize_sample(std::span<const double> xs) {
  SampleSummary out;
  out.count = xs.size();
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - out.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  if (xs.size() < 2) return out;
  out.variance = m2 / (n - 1.0);
  m2 /= n;
  m4 /= n;
  out.mean_se = std::sqrt(out.variance / n);
  out.variance_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  return out;
}

CovarianceEstimate sample_covariance(std::span<const double> xs,
                                     std::span<const double> ys) {
  require(xs.size() == ys.size(), "sample_covariance: length mismatch");
  CovarianceEstimate out;
  const std::size_t count = xs.size();
  if (count < 2) return out;
  const double n = static_cast<double>(count);
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  std::vector<double> products(count);
  for (std::size_t i = 0; i < count; ++i) {
    products[i] = (xs[i] - mx) * (ys[i] - my);
  }
  const double sum = std::accumulate(products.begin(), products.end(), 0.0);
  out.covariance = sum / (n - 1.0);
  const double mean_product = sum / n;
  double spread = 0.0;
  for (double p : products) spread += (p - mean_product) * (p - mean_product);
  out.se = std::sqrt(spread / (n - 1.0) / n);
  return out;
}

double ks_normal(std::span<const double> xs, double mean, double sd) {
  require(!xs.empty() && sd > 0.0, "ks_normal: need samples and sd > 0");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double distance = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf((sorted[i] - mean) / sd);
    distance = std::max({distance, (i + 1) / n - f, f - i / n});
  }
  return distance;
}

double ks_normal_lattice(std::span<const double> xs, double origin, double step,
                         double mean, double sd) {
  require(!xs.empty() && sd > 0.0 && step > 0.0,
          "ks_normal_lattice: need samples, sd > 0 and step > 0");
  std::vector<std::int64_t> ks(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ks[i] = std::llround((xs[i] - origin) / step);
  }
  std::sort(ks.begin(), ks.end());
  const double n = static_cast<double>(ks.size());
  double distance = 0.0;
  std::size_t below = 0;
  for (std::int64_t k = ks.front() - 1; k <= ks.back(); ++k) {
    while (below < ks.size() && ks[below] <= k) ++below;
    const double x = origin + static_cast<double>(k) * step;
    const double f = normal_cdf((x + 0.5 * step - mean) / sd);
    distance = std::max(distance, std::fabs(static_cast<double>(below) / n - f));
  }
  return distance;
}

double chi_square_survival(double statistic, int dof) {
  if (dof <= 0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquareResult chi_square_two_sample(std::span<const std::int64_t> a,
                                      std::span<const std::int64_t> b,
                                      double min_pooled) {
  require(a.size() == b.size(), "chi_square_two_sample: length mismatch");
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  require(na > 0 && nb > 0, "chi_square_two_sample: empty sample");

  std::vector<std::pair<double, double>> cells;
  double ca = 0.0, cb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca += static_cast<double>(a[i]);
    cb += static_cast<double>(b[i]);
    if (ca + cb >= min_pooled) {
      cells.emplace_back(ca, cb);
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0.0) {
    if (cells.empty()) {
      cells.emplace_back(ca, cb);
    } else {
      cells.back().first += ca;
      cells.back().second += cb;
    }
  }
  const double ra = std::sqrt(nb / na);
  const double rb = std::sqrt(na / nb);
  ChiSquareResult out;
  for (const auto& [x, y] : cells) {
    const double diff = ra * x - rb * y;
    out.statistic += diff * diff / (x + y);
  }
  out.dof = static_cast<int>(cells.size()) - 1;
  out.p_value = chi_square_survival(out.statistic, out.dof);
  return out;
}

ChiSquareResult chi_square_goodness(std::span<const std::int64_t> observed,
                                    std::span<const double> probabilities,
                                    double min_expected) {
  require(observed.size() == probabilities.size(),
          "chi_square_goodness: length mismatch");
  const double n = std::accumulate(observed.begin(), observed.end(), 0.0);
  std::vector<std::pair<double, double>> cells;
  double o = 0.0, e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o += static_cast<double>(observed[i]);
    e += n * probabilities[i];
    if (e >= min_expected) {
      cells.emplace_back(o, e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (cells.empty()) {
      cells.emplace_back(o, e);
    } else {
      cells.back().first += o;
      cells.back().second += e;
    }
  }
  ChiSquareResult out;
  for (const auto& [obs, exp] : cells) {
    out.statistic += (obs - exp) * (obs - exp) / exp;
  }
  out.dof = static_cast<int>(cells.size()) - 1;
  out.p_value = chi_square_survival(out.statistic, out.dof);
  return out;
}

int freedman_diaconis_bins(std::span<const double> xs) {
  if (xs.size() < 2) return 1;
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return i + 1 < sorted.size() ? sorted[i] * (1 - frac) + sorted[i + 1] * frac
                                 : sorted[i];
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double range = sorted.back() - sorted.front();
  if (iqr <= 0.0 || range <= 0.0) return 1;
  const double width =
      2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
  return std::max(1, static_cast<int>(std::ceil(range / width)));
}

std::vector<HistogramBin> histogram(std::span<const double> xs, int bins) {
  require(bins >= 1, "histogram: need at least one bin");
  std::vector<HistogramBin> out;
  if (xs.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / bins;
  out.resize(bins);
  for (int b = 0; b < bins; ++b) {
    out[b].lo = lo + b * width;
    out[b].hi = b + 1 == bins ? hi : lo + (b + 1) * width;
  }
  for (double x : xs) {
    int b = static_cast<int>((x - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    ++out[b].count;
  }
  return out;
}

std::vector<HistogramBin> integer_histogram(std::span<const double> xs) {
  std::vector<HistogramBin> out;
  if (xs.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const std::int64_t lo = std::llround(*lo_it);
  const std::int64_t hi = std::llround(*hi_it);
  out.resize(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t k = lo; k <= hi; ++k) {
    out[k - lo].lo = static_cast<double>(k) - 0.5;
    out[k - lo].hi = static_cast<double>(k) + 0.5;
  }
  for (double x : xs) ++out[std::llround(x) - lo].count;
  return out;
}

}  // namespace dyner
