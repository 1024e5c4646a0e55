#include "dyner/regime_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Sparse>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/numeric/odeint.hpp>

#include "checked_solve.hpp"
#include "dyner/errors.hpp"

namespace dyner {

namespace {

using detail::checked_lu;

// Above this order the factorial prefactor k! (N)_k is carried in log space.
constexpr int kLogSpaceOrder = 20;
constexpr double kCrossCheckTolerance = 1e-9;

double log_prefactor(int k, int n) {
  return std::lgamma(k + 1.0) + std::lgamma(n + 1.0) - std::lgamma(n - k + 1.0);
}

double prefactor(int k, int n) {
  double c = 1.0;
  for (int j = 0; j < k; ++j) c *= static_cast<double>(j + 1) * (n - j);
  return c;
}

}  // namespace

RegimeModel::RegimeModel(Generator chain, Vector lambda, Vector mu, int edges,
                         double delta)
    : chain_(std::move(chain)),
      lambda_(std::move(lambda)),
      mu_(std::move(mu)),
      edges_(edges),
      delta_(delta) {
  const Eigen::Index d = chain_.states();
  require(lambda_.size() == d && mu_.size() == d,
          "RegimeModel: lambda and mu must have one entry per regime");
  require((lambda_.array() >= 0.0).all() && (mu_.array() >= 0.0).all() &&
              lambda_.allFinite() && mu_.allFinite(),
          "RegimeModel: rates must be finite and nonnegative");
  require(edges_ >= 1, "RegimeModel: need at least one edge");
  require(delta_ > 0.0 && std::isfinite(delta_),
          "RegimeModel: delta must be positive");
  summary_ = summarize(chain_);
  require(gamma_star() > 0.0, "RegimeModel: lambda* + mu* must be positive");
}

double RegimeModel::speedup(Scaling scaling) const {
  return scaling == Scaling::kScaled ? std::pow(static_cast<double>(edges_), delta_)
                                     : 1.0;
}

Generator RegimeModel::effective_chain(Scaling scaling) const {
  return scaling == Scaling::kScaled ? chain_.scaled(speedup(scaling)) : chain_;
}

RegimeModel RegimeModel::with_edges(int edges) const {
  return RegimeModel(chain_, lambda_, mu_, edges, delta_);
}

RegimeModel RegimeModel::swapped() const {
  return RegimeModel(chain_, mu_, lambda_, edges_, delta_);
}

FactorialMomentTable factorial_moments(const RegimeModel& model, int kmax,
                                       Scaling scaling) {
  const int n = model.edges();
  require(kmax >= 1 && kmax <= n + 1,
          "factorial_moments: need 1 <= kmax <= N + 1");
  const Matrix q = model.effective_chain(scaling).rates();
  const Eigen::Index d = q.rows();
  const Vector gamma = model.gamma();
  const Vector& lambda = model.lambda();

  FactorialMomentTable table;
  table.e.reserve(kmax);
  // w_k = w_{k-1} Lambda (k Gamma - Q)^{-1}, stored as exp(log_w) * w with
  // max |w| = 1 so that the geometric decay never underflows.
  Vector w = model.summary().pi;
  double log_w = 0.0;
  Vector recursion = w;  // e_{k-1} by the one-step recursion
  for (int k = 1; k <= std::min(kmax, n); ++k) {
    Matrix system = -q.transpose();
    system.diagonal() += k * gamma;
    const auto lu = checked_lu(system, "factorial_moments");
    w = lu.solve(lambda.cwiseProduct(w));
    const double w_max = w.cwiseAbs().maxCoeff();
    if (w_max > 0.0) {
      w /= w_max;
      log_w += std::log(w_max);
    }
    recursion = static_cast<double>(k) * (n - k + 1) *
                lu.solve(lambda.cwiseProduct(recursion));

    Vector e(d);
    if (k <= kLogSpaceOrder) {
      e = (prefactor(k, n) * std::exp(log_w)) * w;
    } else {
      const double lc = log_prefactor(k, n) + log_w;
      for (Eigen::Index i = 0; i < d; ++i) {
        e(i) = w(i) > 0.0 ? std::exp(lc + std::log(w(i))) : 0.0;
      }
    }
    const double scale = e.cwiseAbs().maxCoeff();
    if (recursion.allFinite() && e.allFinite() && scale > 0.0 &&
        scale < 1e300) {
      const double gap = (recursion - e).cwiseAbs().maxCoeff() / scale;
      if (gap > kCrossCheckTolerance) {
        fail(ErrorCode::kNumericallyUnstable,
             "factorial_moments: product and recursion disagree at k = " +
                 std::to_string(k));
      }
    }
    table.e.push_back(std::move(e));
  }
  if (kmax == n + 1) table.e.push_back(Vector::Zero(d));
  return table;
}

double stationary_mean(const RegimeModel& model, Scaling scaling) {
  return factorial_moments(model, 1, scaling).total(1);
}

double stationary_variance(const RegimeModel& model, Scaling scaling) {
  const auto table = factorial_moments(model, 2, scaling);
  const double m1 = table.total(1);
  return table.total(2) + m1 - m1 * m1;
}

double JointDistribution::mean() const {
  const Vector marginal = edge_marginal();
  double m = 0.0;
  for (Eigen::Index k = 0; k < marginal.size(); ++k) m += k * marginal(k);
  return m;
}

double JointDistribution::variance() const {
  const Vector marginal = edge_marginal();
  const double m = mean();
  double v = 0.0;
  for (Eigen::Index k = 0; k < marginal.size(); ++k) {
    v += (k - m) * (k - m) * marginal(k);
  }
  return v;
}

double total_variation(const JointDistribution& a, const JointDistribution& b) {
  require(a.p.rows() == b.p.rows() && a.p.cols() == b.p.cols(),
          "total_variation: shape mismatch");
  return 0.5 * (a.p - b.p).cwiseAbs().sum();
}

namespace {

// The inversion amplifies rounding by up to C(N, m) p^m (1 + p)^{N - m}
// (about 1e7 at N = 20), so it runs in quad precision.
using Quad = boost::multiprecision::cpp_bin_float_quad;
using QuadMatrix = std::vector<std::vector<Quad>>;

// Solves a x = b by elimination with partial pivoting.
std::vector<Quad> quad_solve(QuadMatrix a, std::vector<Quad> b) {
  const std::size_t d = b.size();
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < d; ++r) {
      if (abs(a[r][c]) > abs(a[pivot][c])) pivot = r;
    }
    if (a[pivot][c] == 0) {
      fail(ErrorCode::kSingularSystem, "stationary_joint: singular moment system");
    }
    std::swap(a[c], a[pivot]);
    std::swap(b[c], b[pivot]);
    for (std::size_t r = c + 1; r < d; ++r) {
      const Quad factor = a[r][c] / a[c][c];
      for (std::size_t k = c; k < d; ++k) a[r][k] -= factor * a[c][k];
      b[r] -= factor * b[c];
    }
  }
  for (std::size_t c = d; c-- > 0;) {
    for (std::size_t k = c + 1; k < d; ++k) b[c] -= a[c][k] * b[k];
    b[c] /= a[c][c];
  }
  return b;
}

// Invert the binomial moments b_{i,k} = E[C(Y, k) 1{X = i}]:
// p_i(m) = b_{i,m} - sum_{k > m} C(k, m) p_i(k).
JointDistribution joint_from_moments(const RegimeModel& model, Scaling scaling) {
  const int n = model.edges();
  if (n > kMaxEdgesFromMoments) {
    fail(ErrorCode::kNumericallyUnstable,
         "stationary_joint: moment inversion is limited to N <= " +
             std::to_string(kMaxEdgesFromMoments));
  }
  const Matrix q = model.effective_chain(scaling).rates();
  const std::size_t d = static_cast<std::size_t>(q.rows());
  const Vector gamma = model.gamma();
  const Vector lambda = model.lambda();

  // Stationary pi re-solved in quad precision: (Q^T with last row 1) pi = e_d.
  QuadMatrix balance(d, std::vector<Quad>(d));
  std::vector<Quad> unit(d, Quad(0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      balance[i][j] = i + 1 == d ? Quad(1) : Quad(q(j, i));
    }
  }
  unit[d - 1] = 1;
  std::vector<Quad> w = quad_solve(balance, unit);

  std::vector<std::vector<Quad>> binomial_moments(n + 1);
  binomial_moments[0] = w;
  Quad falling = 1;
  for (int k = 1; k <= n; ++k) {
    QuadMatrix system(d, std::vector<Quad>(d));
    std::vector<Quad> rhs(d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) system[i][j] = -Quad(q(j, i));
      system[i][i] += Quad(k) * Quad(gamma(i));
      rhs[i] = Quad(lambda(i)) * w[i];
    }
    w = quad_solve(std::move(system), std::move(rhs));
    for (Quad& x : w) x *= k;  // w now holds k! times the product
    falling = falling * (n - k + 1) / k;
    binomial_moments[k] = w;
    for (Quad& x : binomial_moments[k]) x *= falling;
  }

  std::vector<std::vector<Quad>> choose(n + 1, std::vector<Quad>(n + 1));
  for (int k = 0; k <= n; ++k) {
    choose[k][0] = choose[k][k] = 1;
    for (int m = 1; m < k; ++m) {
      choose[k][m] = choose[k - 1][m - 1] + choose[k - 1][m];
    }
  }

  std::vector<std::vector<Quad>> p(n + 1, std::vector<Quad>(d));
  JointDistribution out;
  out.p.resize(n + 1, static_cast<Eigen::Index>(d));
  for (int m = n; m >= 0; --m) {
    for (std::size_t i = 0; i < d; ++i) {
      Quad value = binomial_moments[m][i];
      for (int k = m + 1; k <= n; ++k) value -= choose[k][m] * p[k][i];
      p[m][i] = value;
      out.p(m, static_cast<Eigen::Index>(i)) = static_cast<double>(value);
    }
  }
  if (out.p.minCoeff() < -1e-10) {
    fail(ErrorCode::kNumericallyUnstable,
         "stationary_joint: moment inversion produced negative mass");
  }
  out.p = out.p.cwiseMax(0.0);
  return out;
}

// Joint generator on (edges m, regime i) indexed s = m d + i.
template <typename Emit>
void for_each_joint_rate(const RegimeModel& model, const Matrix& q, Emit emit) {
  const int n = model.edges();
  const Eigen::Index d = q.rows();
  const Vector& lambda = model.lambda();
  const Vector& mu = model.mu();
  for (int m = 0; m <= n; ++m) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const Eigen::Index s = m * d + i;
      for (Eigen::Index j = 0; j < d; ++j) {
        if (j != i && q(i, j) > 0.0) emit(s, m * d + j, q(i, j));
      }
      if (m < n && lambda(i) > 0.0) emit(s, s + d, lambda(i) * (n - m));
      if (m > 0 && mu(i) > 0.0) emit(s, s - d, mu(i) * m);
    }
  }
}

// Solve p G = 0 with the last unknown pinned to 1, then normalize.
JointDistribution joint_from_generator(const RegimeModel& model,
                                       Scaling scaling) {
  const int n = model.edges();
  const Matrix q = model.effective_chain(scaling).rates();
  const Eigen::Index d = q.rows();
  const Eigen::Index size = (n + 1) * d;
  const Eigen::Index pinned = size - 1;

  std::vector<Eigen::Triplet<double>> triplets;
  Vector diagonal = Vector::Zero(size);
  Vector rhs = Vector::Zero(size - 1);
  for_each_joint_rate(model, q, [&](Eigen::Index from, Eigen::Index to,
                                    double rate) {
    diagonal(from) -= rate;
    // Transposed system: row `to`, column `from`.
    if (to == pinned) return;
    if (from == pinned) {
      rhs(to) -= rate;
    } else {
      triplets.emplace_back(to, from, rate);
    }
  });
  for (Eigen::Index s = 0; s < pinned; ++s) {
    triplets.emplace_back(s, s, diagonal(s));
  }

  Eigen::SparseMatrix<double> a(size - 1, size - 1);
  a.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(a);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::kSingularSystem, "stationary_joint: generator solve failed");
  }
  const Vector x = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !x.allFinite()) {
    fail(ErrorCode::kSingularSystem, "stationary_joint: generator solve failed");
  }

  Vector full(size);
  full.head(size - 1) = x;
  full(pinned) = 1.0;
  full = full.cwiseMax(0.0);
  full /= full.sum();

  JointDistribution out;
  out.p.resize(n + 1, d);
  for (int m = 0; m <= n; ++m) {
    for (Eigen::Index i = 0; i < d; ++i) out.p(m, i) = full(m * d + i);
  }
  return out;
}

}  // namespace

JointDistribution stationary_joint(const RegimeModel& model, JointMethod method,
                                   Scaling scaling) {
  return method == JointMethod::kFromMoments
             ? joint_from_moments(model, scaling)
             : joint_from_generator(model, scaling);
}

namespace {

using State = std::vector<double>;

// Forward equations dp/dt = p G on the joint space, in the same layout as
// joint_from_generator.
struct ForwardEquations {
  int n;
  Eigen::Index d;
  Matrix q;
  Vector lambda;
  Vector mu;

  void operator()(const State& p, State& dpdt, double /*t*/) const {
    for (int m = 0; m <= n; ++m) {
      for (Eigen::Index i = 0; i < d; ++i) {
        const Eigen::Index s = m * d + i;
        double flow = -p[s] * (-q(i, i) + mu(i) * m + lambda(i) * (n - m));
        for (Eigen::Index j = 0; j < d; ++j) {
          if (j != i) flow += p[m * d + j] * q(j, i);
        }
        if (m > 0) flow += p[s - d] * lambda(i) * (n - m + 1);
        if (m < n) flow += p[s + d] * mu(i) * (m + 1);
        dpdt[s] = flow;
      }
    }
  }
};

JointDistribution to_joint(const State& p, int n, Eigen::Index d) {
  JointDistribution out;
  out.p.resize(n + 1, d);
  for (int m = 0; m <= n; ++m) {
    for (Eigen::Index i = 0; i < d; ++i) out.p(m, i) = p[m * d + i];
  }
  return out;
}

}  // namespace

std::vector<JointDistribution> transient_distribution(
    const RegimeModel& model, int y0, const Vector& x0,
    std::span<const double> times, Scaling scaling,
    const TransientOptions& options) {
  namespace odeint = boost::numeric::odeint;
  const int n = model.edges();
  const Eigen::Index d = model.regimes();
  require(y0 >= 0 && y0 <= n, "transient_distribution: y0 outside [0, N]");
  const Vector initial = x0.size() == 0 ? model.summary().pi : x0;
  require(initial.size() == d && (initial.array() >= 0.0).all() &&
              std::fabs(initial.sum() - 1.0) < 1e-9,
          "transient_distribution: x0 must be a distribution over regimes");
  require(std::is_sorted(times.begin(), times.end()) &&
              (times.empty() || times.front() >= 0.0),
          "transient_distribution: times must be nondecreasing and >= 0");

  ForwardEquations system{n, d, model.effective_chain(scaling).rates(),
                          model.lambda(), model.mu()};
  State p(static_cast<std::size_t>((n + 1) * d), 0.0);
  for (Eigen::Index i = 0; i < d; ++i) p[y0 * d + i] = initial(i);

  const double fastest =
      (system.q.diagonal().cwiseAbs() +
       n * (system.lambda.cwiseMax(system.mu)))
          .maxCoeff();
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(
      options.abs_tol, options.rel_tol);

  std::vector<JointDistribution> out;
  out.reserve(times.size());
  double t = 0.0;
  double dt = 0.1 / std::max(1.0, fastest);
  for (double target : times) {
    while (t < target) {
      double step = std::min(dt, target - t);
      const bool clipped = step < dt;
      const odeint::controlled_step_result result =
          stepper.try_step(system, p, t, step);
      if (result == odeint::success) {
        // A step shortened to land on an output time says little about the
        // admissible step size, so it may only grow dt.
        dt = clipped ? std::max(dt, step) : step;
      } else {
        dt = step;
        if (dt < options.min_step * std::max(1.0, t)) {
          fail(ErrorCode::kStepSizeUnderflow,
               "transient_distribution: step size underflow at t = " +
                   std::to_string(t));
        }
      }
      if (target - t < 1e-14 * std::max(1.0, target)) t = target;
    }
    out.push_back(to_joint(p, n, d));
  }
  return out;
}

JointDistribution transient_distribution(const RegimeModel& model, int y0,
                                         const Vector& x0, double t,
                                         Scaling scaling,
                                         const TransientOptions& options) {
  const double times[] = {t};
  return transient_distribution(model, y0, x0, times, scaling, options).front();
}

double VarianceExpansion::predict(double edges, double delta) const {
  return edges * rho_bar * (1.0 - rho_bar) + std::pow(edges, 2.0 - delta) * v;
}

VarianceExpansion scaled_variance_expansion(const RegimeModel& model) {
  VarianceExpansion out;
  out.rho_bar = model.rho_bar();
  const Vector centered = model.lambda() - out.rho_bar * model.gamma();
  const Vector& pi = model.summary().pi;
  out.v = pi.cwiseProduct(centered).dot(model.summary().deviation * centered) /
          model.gamma_star();
  return out;
}

MomentReport regime_moment_report(const RegimeModel& model, Scaling scaling) {
  MomentReport report;
  report.model = scaling == Scaling::kScaled ? "regime-switching (scaled)"
                                             : "regime-switching";
  report.edges = model.edges();
  const double n = model.edges();
  const double mean = stationary_mean(model, scaling);
  const double variance = stationary_variance(model, scaling);
  const VarianceExpansion expansion = scaled_variance_expansion(model);

  report.add("lambda_star", model.lambda_star(), "pi^T lambda");
  report.add("mu_star", model.mu_star(), "pi^T mu");
  report.add("rho_bar", expansion.rho_bar, "lambda* / (lambda* + mu*)");
  report.add("mean", mean, "exact: e_1^T 1 from the factorial-moment product");
  report.add("variance", variance,
             "exact: e_2^T 1 + e_1^T 1 - (e_1^T 1)^2");
  report.add("mean_per_edge", mean / n, "exact mean / N");
  report.add("variance_per_edge", variance / n, "exact variance / N");
  report.add("v", expansion.v,
             "pi^T (Lambda - rho Gamma) D (Lambda - rho Gamma) 1 / gamma*");
  report.add("variance_expansion", expansion.predict(n, model.delta()),
             "N rho (1 - rho) + N^(2 - delta) v");
  return report;
}

}  // namespace dyner
