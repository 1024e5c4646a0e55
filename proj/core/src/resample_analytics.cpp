#include "dyner/resample_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "checked_solve.hpp"
#include "dyner/errors.hpp"

namespace dyner {

TransitionLaw::TransitionLaw(std::vector<TransitionAtom> atoms)
    : atoms_(std::move(atoms)) {
  require(!atoms_.empty(), "TransitionLaw: need at least one atom");
  double total = 0.0;
  for (const auto& atom : atoms_) {
    require(atom.p >= 0.0 && atom.p <= 1.0 && atom.r >= 0.0 && atom.r <= 1.0,
            "TransitionLaw: p and r must lie in [0, 1]");
    require(atom.weight > 0.0, "TransitionLaw: weights must be positive");
    total += atom.weight;
  }
  require(std::fabs(total - 1.0) <= 1e-12,
          "TransitionLaw: weights must sum to 1");
}

TransitionMoments TransitionLaw::moments() const {
  TransitionMoments m;
  for (const auto& [p, r, w] : atoms_) {
    const double p_bar = 1.0 - p, r_bar = 1.0 - r;
    const double persist = p + r - 1.0;
    m.mean_p += w * p;
    m.mean_r += w * r;
    m.mean_p_bar_sq += w * p_bar * p_bar;
    m.mean_r_bar_sq += w * r_bar * r_bar;
    m.mean_p_bar_r_bar += w * p_bar * r_bar;
    m.mean_persist_sq += w * persist * persist;
    m.mean_persist_p_bar += w * persist * p_bar;
  }
  return m;
}

TransitionLaw TransitionLaw::swapped() const {
  std::vector<TransitionAtom> out;
  out.reserve(atoms_.size());
  for (const auto& atom : atoms_) out.push_back({atom.r, atom.p, atom.weight});
  return TransitionLaw(std::move(out));
}

ResampleModel::ResampleModel(TransitionLaw law_in, int edges_in)
    : law(std::move(law_in)), edges(edges_in) {
  require(edges >= 1, "ResampleModel: need at least one edge");
}

namespace {

constexpr double kDegenerate = 1e-15;

double mean_from(const TransitionMoments& m, int n) {
  const double denominator = 2.0 - m.mean_p - m.mean_r;
  if (denominator <= kDegenerate) {
    fail(ErrorCode::kDegenerateDenominator,
         "resample model with P = R = 1 a.s. has no unique stationary law");
  }
  return n * (1.0 - m.mean_p) / denominator;
}

}  // namespace

double stationary_mean(const ResampleModel& model) {
  return mean_from(model.law.moments(), model.edges);
}

ResampleVariance stationary_variance(const ResampleModel& model) {
  const TransitionMoments m = model.law.moments();
  const double n = model.edges;
  const double alpha = mean_from(m, model.edges);
  const double stay = 1.0 - m.mean_persist_sq;
  if (stay <= 1e-12) {
    fail(ErrorCode::kUnstableSecondMoment,
         "resample variance: E (P+R-1)^2 is 1, the second moment has no "
         "stationary value");
  }
  const double beta = (n * (n - 1.0) * m.mean_p_bar_sq +
                       2.0 * (n - 1.0) * alpha * m.mean_persist_p_bar) /
                      stay;

  ResampleVariance out;
  out.variance = alpha - alpha * alpha + beta;

  const double p_bar = 1.0 - m.mean_p, r_bar = 1.0 - m.mean_r;
  const double total = p_bar + r_bar;
  out.gamma1 = (m.mean_r_bar_sq * p_bar * p_bar -
                2.0 * m.mean_p_bar_r_bar * p_bar * r_bar +
                m.mean_p_bar_sq * r_bar * r_bar) /
               (stay * total * total);
  out.gamma2 = (-m.mean_r_bar_sq * p_bar + 2.0 * p_bar * r_bar -
                m.mean_p_bar_sq * r_bar) /
               (stay * total);

  const double decomposed = out.gamma1 * n * n + out.gamma2 * n;
  const double gap = std::fabs(decomposed - out.variance);
  if (gap > 1e-9 * std::max(std::fabs(out.variance), std::fabs(decomposed)) +
                1e-12 * n) {
    fail(ErrorCode::kNumericallyUnstable,
         "resample variance: closed forms disagree");
  }
  return out;
}

double lag1_covariance(const ResampleModel& model) {
  const TransitionMoments m = model.law.moments();
  const double mean = stationary_mean(model);
  const double second = stationary_variance(model).variance + mean * mean;
  return (m.mean_p + m.mean_r - 1.0) * second +
         (1.0 - m.mean_p) * model.edges * mean - mean * mean;
}

namespace {

// Binomial(n, q) probabilities for k = 0..n.
std::vector<double> binomial_pmf(int n, double q) {
  std::vector<double> out(n + 1, 0.0);
  if (q <= 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (q >= 1.0) {
    out[n] = 1.0;
    return out;
  }
  const double log_q = std::log(q), log_1mq = std::log1p(-q);
  const double lg_n = std::lgamma(n + 1.0);
  for (int k = 0; k <= n; ++k) {
    out[k] = std::exp(lg_n - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                      k * log_q + (n - k) * log_1mq);
  }
  return out;
}

double l1_residual(const Vector& v, const Matrix& kernel) {
  return (kernel.transpose() * v - v).lpNorm<1>();
}

constexpr double kFixedPointTolerance = 1e-12;

}  // namespace

namespace {

// poly *= (a + b z), in place; the degree grows by one.
void multiply_linear(std::vector<double>& poly, double a, double b) {
  poly.push_back(0.0);
  for (std::size_t j = poly.size() - 1; j > 0; --j) {
    poly[j] = a * poly[j] + b * poly[j - 1];
  }
  poly[0] *= a;
}

// Row k of one atom's kernel is the coefficient list of
//   T(k, N - k) = (1 - r + r z)^k (p + (1 - p) z)^{N - k}.
// Rows lo..hi share the factor T(lo, N - hi) = `base`; splitting the range
// and multiplying the missing linear factors into each half builds all rows
// in O(N^2 log N) with nonnegative arithmetic only.
void fill_rows(int lo, int hi, const std::vector<double>& base, double p, double r,
               double weight, Matrix& kernel) {
  if (lo == hi) {
    for (std::size_t j = 0; j < base.size(); ++j) kernel(lo, j) += weight * base[j];
    return;
  }
  const int mid = lo + (hi - lo) / 2;
  std::vector<double> left = base;
  for (int i = 0; i < hi - mid; ++i) multiply_linear(left, p, 1.0 - p);
  fill_rows(lo, mid, left, p, r, weight, kernel);
  std::vector<double> right = base;
  for (int i = 0; i < mid + 1 - lo; ++i) multiply_linear(right, 1.0 - r, r);
  fill_rows(mid + 1, hi, right, p, r, weight, kernel);
}

}  // namespace

Matrix transition_kernel(const ResampleModel& model) {
  const int n = model.edges;
  Matrix kernel = Matrix::Zero(n + 1, n + 1);
  for (const auto& [p, r, w] : model.law.atoms()) {
    fill_rows(0, n, {1.0}, p, r, w, kernel);
  }
  return kernel;
}

Vector kernel_stationary(const ResampleModel& model,
                         const KernelOptions& options) {
  const int n = model.edges;
  const TransitionMoments m = model.law.moments();
  if (2.0 - m.mean_p - m.mean_r <= kDegenerate) {
    fail(ErrorCode::kDegenerateDenominator,
         "kernel_stationary: P = R = 1 a.s. freezes the chain");
  }
  const Matrix kernel = transition_kernel(model);
  const Eigen::Index size = n + 1;
  Vector v;

  if (n <= options.direct_limit) {
    // v (I - K + 1 1^T) = 1^T.
    Matrix system = Matrix::Identity(size, size) - kernel;
    system.array() += 1.0;
    v = detail::checked_lu(system.transpose(), "kernel_stationary")
            .solve(Vector::Ones(size));
    v = v.cwiseMax(0.0);
    v /= v.sum();
  } else {
    // Start from the binomial law with the stationary mean.
    const double rho = std::clamp(mean_from(m, n) / n, 0.0, 1.0);
    const std::vector<double> start = binomial_pmf(n, rho);
    v = Eigen::Map<const Vector>(start.data(), size);
  }

  const Matrix kernel_t = kernel.transpose();
  Vector previous, before_previous;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (l1_residual(v, kernel) < kFixedPointTolerance) return v;
    before_previous = std::move(previous);
    previous = v;
    v = kernel_t * previous;
    v /= v.sum();
    // Aitken extrapolation every third iterate, kept only if it helps.
    if (iter % 3 == 2 && before_previous.size() == size) {
      const Vector second = v - 2.0 * previous + before_previous;
      Vector accelerated = v;
      for (Eigen::Index j = 0; j < size; ++j) {
        if (std::fabs(second(j)) > 1e-300) {
          const double step = v(j) - previous(j);
          accelerated(j) = v(j) - step * step / second(j);
        }
      }
      if ((accelerated.array() >= 0.0).all() && accelerated.sum() > 0.0) {
        accelerated /= accelerated.sum();
        if (l1_residual(accelerated, kernel) < l1_residual(v, kernel)) {
          v = std::move(accelerated);
        }
      }
    }
  }
  if (l1_residual(v, kernel) < kFixedPointTolerance) return v;
  fail(ErrorCode::kNoConvergence,
       "kernel_stationary: no fixed point after " +
           std::to_string(options.max_iterations) + " iterations");
}

TransitionLaw embed_continuous(const ContinuousResampleSpec& spec) {
  require(spec.period > 0.0 && std::isfinite(spec.period),
          "embed_continuous: period must be positive");
  std::vector<TransitionAtom> atoms;
  for (const auto& [up, down, w] : spec.lambda_mu.discretize(spec.nodes)) {
    const double total = up + down;
    if (total <= 0.0) {
      fail(ErrorCode::kZeroRateAtom,
           "embed_continuous: an atom has Lambda + M = 0");
    }
    const double decay = std::expm1(-total * spec.period);  // e^{-G t} - 1
    atoms.push_back({1.0 + up / total * decay, 1.0 + down / total * decay, w});
  }
  return TransitionLaw(std::move(atoms));
}

ScaledResampleLaw::ScaledResampleLaw(PairLaw law, double delta_in, int nodes_in)
    : eta_zeta(std::move(law)), delta(delta_in), nodes(nodes_in) {
  require(delta > 0.0 && std::isfinite(delta),
          "ScaledResampleLaw: delta must be positive");
  const PairMoments m = eta_zeta.moments();
  require(m.mean_a + m.mean_b > 0.0,
          "ScaledResampleLaw: E eta + E zeta must be positive");
}

TransitionLaw ScaledResampleLaw::discrete_law(int edges) const {
  require(edges >= 1, "ScaledResampleLaw: need N >= 1");
  const double scale = speedup(edges);
  std::vector<TransitionAtom> atoms;
  for (const auto& [eta, zeta, w] : eta_zeta.discretize(nodes)) {
    require(eta <= scale && zeta <= scale,
            "ScaledResampleLaw: eta and zeta must not exceed N^delta");
    atoms.push_back({1.0 - eta / scale, 1.0 - zeta / scale, w});
  }
  return TransitionLaw(std::move(atoms));
}

TransitionLaw ScaledResampleLaw::embedded(int edges) const {
  require(edges >= 1, "ScaledResampleLaw: need N >= 1");
  return embed_continuous({eta_zeta, 1.0 / speedup(edges), nodes});
}

ScaledMoments scaled_moments(const ScaledResampleLaw& law) {
  const PairMoments m = law.eta_zeta.moments();
  ScaledMoments out;
  out.delta = law.delta;
  out.rate = m.mean_a + m.mean_b;
  out.rho_bar = m.mean_a / out.rate;
  out.v = (m.second_b * m.mean_a * m.mean_a -
           2.0 * m.cross * m.mean_a * m.mean_b +
           m.second_a * m.mean_b * m.mean_b) /
          (2.0 * out.rate * out.rate * out.rate);
  return out;
}

double scaled_lag1_correlation(const ScaledResampleLaw& law, int edges) {
  const PairMoments m = law.eta_zeta.moments();
  return 1.0 - (m.mean_a + m.mean_b) / law.speedup(edges);
}

MomentReport resample_moment_report(const ResampleModel& model) {
  MomentReport report;
  report.model = "resampling";
  report.edges = model.edges;
  const double n = model.edges;
  const double mean = stationary_mean(model);
  const ResampleVariance var = stationary_variance(model);
  const double cov = lag1_covariance(model);
  report.add("mean", mean, "N (1 - E P) / (2 - E P - E R)");
  report.add("variance", var.variance, "alpha - alpha^2 + beta");
  report.add("gamma1", var.gamma1, "N^2 coefficient of Var Y");
  report.add("gamma2", var.gamma2, "N coefficient of Var Y");
  report.add("lag1_covariance", cov,
             "(EP + ER - 1) E Y^2 + (1 - EP) N E Y - (E Y)^2");
  report.add("lag1_correlation", var.variance > 0 ? cov / var.variance : 0.0,
             "lag1_covariance / variance");
  report.add("mean_per_edge", mean / n, "mean / N");
  report.add("variance_per_edge", var.variance / n, "variance / N");
  return report;
}

MomentReport resample_moment_report(const ScaledResampleLaw& law, int edges) {
  const ScaledMoments scaled = scaled_moments(law);
  const ResampleModel embedded(law.embedded(edges), edges);
  MomentReport report = resample_moment_report(embedded);
  report.model = "resampling (scaled, continuous-time embedding)";
  report.add("rho_bar", scaled.rho_bar, "E eta / (E eta + E zeta)");
  report.add("v", scaled.v,
             "Var(eta - rho (eta + zeta)) / (2 (E eta + E zeta))");
  report.add("variance_coefficient", scaled.linear_coefficient(),
             "rho (1 - rho) + v");
  report.add("variance_expansion", scaled.predict(edges),
             "N rho (1 - rho) + N^(2 - delta) v");
  report.add("lag1_correlation_leading", scaled_lag1_correlation(law, edges),
             "1 - (E eta + E zeta) N^-delta");
  return report;
}

}  // namespace dyner
