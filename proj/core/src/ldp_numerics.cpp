#include "dyner/ldp_numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "dyner/csv.hpp"
#include "dyner/errors.hpp"
#include "dyner/rng.hpp"

namespace dyner {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kThetaBound = 50.0;

}  // namespace

LocalRate legendre_transform(const std::function<CumulantValue(double)>& cumulant,
                             const CumulantTails& tails, double y) {
  LocalRate out;
  if (tails.lower_bounded && tails.upper_bounded) {
    // Lambda' vanishes identically: only y = 0 is reachable.
    if (y == 0.0) return out;
    return {kInfinity, 0.0, false};
  }
  if (tails.lower_bounded && y <= 0.0) {
    if (y < 0.0) return {kInfinity, -kInfinity, false};
    return {std::max(0.0, -tails.lower_value), -kInfinity, false};
  }
  if (tails.upper_bounded && y >= 0.0) {
    if (y > 0.0) return {kInfinity, kInfinity, false};
    return {std::max(0.0, -tails.upper_value), kInfinity, false};
  }

  double lo = -1.0, hi = 1.0;
  while (cumulant(lo).d1 > y && lo > -kThetaBound) lo = std::max(2.0 * lo, -kThetaBound);
  while (cumulant(hi).d1 < y && hi < kThetaBound) hi = std::min(2.0 * hi, kThetaBound);
  if (cumulant(lo).d1 > y || cumulant(hi).d1 < y) {
    const double edge = cumulant(lo).d1 > y ? lo : hi;
    return {std::max(0.0, edge * y - cumulant(edge).value), edge, false};
  }

  double theta = std::clamp(0.0, lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const CumulantValue c = cumulant(theta);
    const double residual = c.d1 - y;
    if (std::fabs(residual) <= 1e-14 * std::max(1.0, std::fabs(y))) break;
    if (residual < 0.0) {
      lo = theta;
    } else {
      hi = theta;
    }
    if (hi - lo <= 1e-15 * (1.0 + std::fabs(theta))) break;
    double next = c.d2 > 0.0 ? theta - residual / c.d2 : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    theta = next;
  }
  out.theta = theta;
  out.rate = std::max(0.0, theta * y - cumulant(theta).value);
  return out;
}

CumulantValue RegimeCumulant::operator()(double theta) const {
  const double up = std::exp(theta), down = std::exp(-theta);
  return {births * std::expm1(theta) + deaths * std::expm1(-theta),
          births * up - deaths * down, births * up + deaths * down};
}

CumulantTails RegimeCumulant::tails() const {
  CumulantTails t;
  t.upper_bounded = births == 0.0;
  t.upper_value = -deaths;
  t.lower_bounded = deaths == 0.0;
  t.lower_value = -births;
  return t;
}

RegimeCumulant regime_cumulant(double x, const Vector& g,
                               const RegimeModel& model,
                               CumulantConvention convention) {
  require(x >= 0.0 && x <= 1.0, "regime cumulant: x must lie in [0, 1]");
  require(g.size() == model.regimes() && (g.array() >= 0.0).all() &&
              std::fabs(g.sum() - 1.0) <= 1e-12,
          "regime cumulant: g must be a distribution over regimes");
  const double lambda_g = g.dot(model.lambda());
  const double mu_g = g.dot(model.mu());
  if (convention == CumulantConvention::kBirthsOnOccupied) {
    return {x * lambda_g, (1.0 - x) * mu_g};
  }
  return {(1.0 - x) * lambda_g, x * mu_g};
}

double cumulant_regime(double x, const Vector& g, double theta,
                       const RegimeModel& model, CumulantConvention convention) {
  return regime_cumulant(x, g, model, convention)(theta).value;
}

LocalRate local_rate_regime(double x, const Vector& g, double y,
                            const RegimeModel& model,
                            CumulantConvention convention) {
  const RegimeCumulant c = regime_cumulant(x, g, model, convention);
  return legendre_transform(c, c.tails(), y);
}

namespace {

// f(w) = sum_i g_i q_i - sum_{i != j} g_i q_ij e^{w_j - w_i} with w_0 = 0,
// together with its gradient and Hessian in (w_1, ..., w_{d-1}).
struct OccupationObjective {
  const Matrix& q;
  const Vector& g;

  double value(const Vector& w) const {
    const Eigen::Index d = q.rows();
    double f = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      f -= g(i) * q(i, i);
      for (Eigen::Index j = 0; j < d; ++j) {
        if (j != i) f -= g(i) * q(i, j) * std::exp(w(j) - w(i));
      }
    }
    return f;
  }

  void derivatives(const Vector& w, Vector& grad, Matrix& hess) const {
    const Eigen::Index d = q.rows();
    Matrix t = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        if (j != i) t(i, j) = g(i) * q(i, j) * std::exp(w(j) - w(i));
      }
    }
    grad.resize(d - 1);
    hess.resize(d - 1, d - 1);
    for (Eigen::Index k = 1; k < d; ++k) {
      grad(k - 1) = t.row(k).sum() - t.col(k).sum();
      for (Eigen::Index l = 1; l < d; ++l) {
        hess(k - 1, l - 1) = k == l ? -(t.row(k).sum() + t.col(k).sum())
                                    : t(k, l) + t(l, k);
      }
    }
  }
};

constexpr int kRestarts = 8;
constexpr std::uint64_t kRestartSeed = 0x6f63637570617469ULL;

}  // namespace

double occupation_cost_density(const Vector& g, const RegimeModel& model) {
  const Matrix& q = model.chain().rates();
  const Eigen::Index d = q.rows();
  require(g.size() == d && (g.array() >= 0.0).all() &&
              std::fabs(g.sum() - 1.0) <= 1e-12,
          "occupation_cost_density: g must be a distribution over regimes");
  if (d == 1) return 0.0;
  const OccupationObjective objective{q, g};
  const double scale = std::max(1.0, q.diagonal().cwiseAbs().maxCoeff());

  double best = 0.0;  // u = 1 is always feasible
  double best_gradient = kInfinity;
  for (int restart = 0; restart < kRestarts; ++restart) {
    Vector w = Vector::Zero(d);
    if (restart > 0) {
      CounterRng rng(kRestartSeed, static_cast<std::uint64_t>(restart));
      for (Eigen::Index k = 1; k < d; ++k) w(k) = 4.0 * uniform01(rng) - 2.0;
    }
    double f = objective.value(w);
    Vector grad;
    Matrix hess;
    double gradient_norm = kInfinity;
    for (int iter = 0; iter < 200; ++iter) {
      objective.derivatives(w, grad, hess);
      gradient_norm = grad.lpNorm<Eigen::Infinity>();
      if (gradient_norm <= 1e-13 * scale) break;
      // Newton direction on the concave objective, gradient ascent fallback.
      Vector step = (-hess).ldlt().solve(grad);
      if (!step.allFinite() || step.dot(grad) <= 0.0) step = grad / scale;
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        Vector trial = w;
        trial.tail(d - 1) += alpha * step;
        const double ft = objective.value(trial);
        if (ft >= f + 1e-4 * alpha * step.dot(grad)) {
          moved = ft > f || alpha == 1.0;
          w = std::move(trial);
          f = ft;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    if (f > best) best = f;
    best_gradient = std::min(best_gradient, gradient_norm);
  }
  if (g.minCoeff() > 1e-9 && best_gradient > 1e-6 * scale) {
    fail(ErrorCode::kNoConvergence,
         "occupation_cost_density: optimizer did not converge");
  }
  return std::max(0.0, best);
}

double occupation_cost_density_ratio_search(const Vector& g,
                                            const RegimeModel& model) {
  const Matrix& q = model.chain().rates();
  require(q.rows() == 2, "ratio search applies to two regimes");
  require(g.size() == 2, "occupation cost: g has wrong length");
  const double a = g(0) * q(0, 1), b = g(1) * q(1, 0);
  auto f = [a, b](double w) { return a + b - a * std::exp(w) - b * std::exp(-w); };
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = -40.0, hi = 40.0;
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-12) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    }
  }
  return std::max(0.0, f(0.5 * (lo + hi)));
}

CumulantValue ResampleCumulant::operator()(double theta) const {
  const double s = (1.0 - x) * std::expm1(theta);
  const double t = x * std::expm1(-theta);
  const double ds = (1.0 - x) * std::exp(theta);
  const double dt = -x * std::exp(-theta);
  const LogMgf k = law->log_mgf(s, t);
  if (!std::isfinite(k.value)) {
    fail(ErrorCode::kMgfDiverges, "resample cumulant: moment generating "
                                  "function is not finite");
  }
  return {k.value, k.ds * ds + k.dt * dt,
          k.dss * ds * ds + 2.0 * k.dst * ds * dt + k.dtt * dt * dt +
              k.ds * ds - k.dt * dt};
}

CumulantTails ResampleCumulant::tails() const {
  CumulantTails out;
  out.upper_bounded = (1.0 - x) * law->range_a().second == 0.0;
  out.upper_value = law->log_mgf(0.0, -x).value;
  out.lower_bounded = x * law->range_b().second == 0.0;
  out.lower_value = law->log_mgf(-(1.0 - x), 0.0).value;
  return out;
}

double ResampleCumulant::drift() const {
  const PairMoments m = law->moments();
  return (1.0 - x) * m.mean_a - x * m.mean_b;
}

double cumulant_resample(double x, double theta, const ScaledResampleLaw& law) {
  require(x >= 0.0 && x <= 1.0, "resample cumulant: x must lie in [0, 1]");
  return ResampleCumulant{&law.eta_zeta, x}(theta).value;
}

LocalRate local_rate_resample(double x, double y, const ScaledResampleLaw& law) {
  require(x >= 0.0 && x <= 1.0, "resample local rate: x must lie in [0, 1]");
  const ResampleCumulant c{&law.eta_zeta, x};
  return legendre_transform(c, c.tails(), y);
}

OccupationProfile OccupationProfile::constant(const Vector& g, int points) {
  return {std::vector<Vector>(static_cast<std::size_t>(points), g)};
}

namespace {

void check_path(const PathFunction& f) {
  require(f.values.size() >= 2 && f.horizon > 0.0,
          "PathFunction: need at least one segment and a positive horizon");
  for (double v : f.values) {
    require(v >= 0.0 && v <= 1.0, "PathFunction: values must lie in [0, 1]");
  }
}

// Trapezoid contribution of one segment of the resampling path cost.
double resample_segment(double a, double b, double h,
                        const ScaledResampleLaw& law) {
  const double slope = (b - a) / h;
  const double ra = local_rate_resample(a, slope, law).rate;
  const double rb = local_rate_resample(b, slope, law).rate;
  return 0.5 * h * (ra + rb);
}

}  // namespace

double path_cost(const PathFunction& f, const ScaledResampleLaw& law) {
  check_path(f);
  const double h = f.step();
  double cost = 0.0;
  for (int j = 0; j < f.segments(); ++j) {
    cost += resample_segment(f.values[j], f.values[j + 1], h, law);
    if (std::isinf(cost)) return kInfinity;
  }
  return cost;
}

namespace {

// Cost attributed to grid point j of a regime path under occupation g: half
// of each adjacent segment's local-rate trapezoid and the J weight.
double regime_node_cost(const PathFunction& f, int j, const Vector& g,
                        const RegimeModel& model, CumulantConvention convention,
                        double occupation) {
  const double h = f.step();
  const int k = f.segments();
  double cost = 0.0;
  if (j > 0) {
    cost += 0.5 * h *
            local_rate_regime(f.values[j], g, f.slope(j - 1), model, convention)
                .rate;
  }
  if (j < k) {
    cost += 0.5 * h *
            local_rate_regime(f.values[j], g, f.slope(j), model, convention).rate;
  }
  const double weight = (j == 0 || j == k) ? 0.5 * h : h;
  return cost + weight * occupation;
}

}  // namespace

double path_cost(const PathFunction& f, const RegimeModel& model,
                 const OccupationProfile& g, CumulantConvention convention) {
  check_path(f);
  require(g.g.size() == f.values.size(),
          "path_cost: profile needs one vector per grid point");
  double cost = 0.0;
  for (int j = 0; j <= f.segments(); ++j) {
    cost += regime_node_cost(f, j, g.g[j], model, convention,
                             occupation_cost_density(g.g[j], model));
    if (std::isinf(cost)) return kInfinity;
  }
  return cost;
}

ProfileMinimum minimize_over_profiles(const PathFunction& f,
                                      const RegimeModel& model, int resolution,
                                      CumulantConvention convention) {
  check_path(f);
  const int d = model.regimes();
  if (d > 2) {
    fail(ErrorCode::kUnsupportedDimension,
         "minimize_over_profiles: only one or two regimes are supported");
  }
  require(resolution >= 1, "minimize_over_profiles: resolution must be >= 1");
  ProfileMinimum out;
  const int points = static_cast<int>(f.values.size());
  if (d == 1) {
    out.g_star = OccupationProfile::constant(Vector::Ones(1), points);
    out.cost = path_cost(f, model, out.g_star, convention);
    return out;
  }

  std::vector<double> candidates;
  for (int k = 0; k <= resolution; ++k) {
    candidates.push_back(static_cast<double>(k) / resolution);
  }
  candidates.push_back(model.summary().pi(0));
  std::vector<std::pair<Vector, double>> evaluated;
  evaluated.reserve(candidates.size());
  for (double g1 : candidates) {
    Vector g(2);
    g << g1, 1.0 - g1;
    evaluated.emplace_back(g, occupation_cost_density(g, model));
  }

  out.g_star.g.resize(points);
  for (int j = 0; j < points; ++j) {
    double best = kInfinity;
    const Vector* best_g = &evaluated.back().first;
    // The pi candidate is tried first so that ties keep it.
    for (auto it = evaluated.rbegin(); it != evaluated.rend(); ++it) {
      const double c =
          regime_node_cost(f, j, it->first, model, convention, it->second);
      if (c < best) {
        best = c;
        best_g = &it->first;
      }
    }
    out.g_star.g[j] = *best_g;
    out.cost += best;
  }
  return out;
}

EndpointCost minimize_endpoint_cost(const ScaledResampleLaw& law, double x0,
                                    double target, double horizon,
                                    int segments) {
  require(segments >= 1 && horizon > 0.0,
          "minimize_endpoint_cost: need segments >= 1 and horizon > 0");
  require(x0 >= 0.0 && x0 <= 1.0 && target >= 0.0 && target <= 1.0,
          "minimize_endpoint_cost: endpoints must lie in [0, 1]");
  EndpointCost out;
  out.path.horizon = horizon;
  out.path.values.resize(segments + 1);
  for (int j = 0; j <= segments; ++j) {
    out.path.values[j] = x0 + (target - x0) * j / segments;
  }
  std::vector<double>& f = out.path.values;
  const double h = horizon / segments;
  auto local = [&](int j, double value) {
    return resample_segment(f[j - 1], value, h, law) +
           resample_segment(value, f[j + 1], h, law);
  };

  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double previous = path_cost(out.path, law);
  for (int sweep = 0; sweep < 200 && segments > 1; ++sweep) {
    for (int j = 1; j < segments; ++j) {
      double lo = 0.0, hi = 1.0;
      double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
      double f1 = local(j, x1), f2 = local(j, x2);
      while (hi - lo > 1e-10) {
        if (f1 > f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + ratio * (hi - lo);
          f2 = local(j, x2);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - ratio * (hi - lo);
          f1 = local(j, x1);
        }
      }
      const double candidate = 0.5 * (lo + hi);
      if (local(j, candidate) < local(j, f[j])) f[j] = candidate;
    }
    const double current = path_cost(out.path, law);
    if (previous - current < 1e-12) {
      previous = current;
      break;
    }
    previous = current;
  }
  out.cost = previous;
  return out;
}

void write_rate_table_csv(std::ostream& out, const ScaledResampleLaw& law,
                          const std::vector<double>& xs,
                          const std::vector<double>& ys) {
  out << "x,y,rate\n";
  for (double x : xs) {
    for (double y : ys) {
      out << format_number(x) << ',' << format_number(y) << ','
          << format_number(local_rate_resample(x, y, law).rate) << '\n';
    }
  }
}

void write_profile_csv(std::ostream& out, const PathFunction& f,
                       const RegimeModel& model, const OccupationProfile& g,
                       CumulantConvention convention) {
  check_path(f);
  const int d = model.regimes();
  out << 's';
  for (int i = 1; i <= d; ++i) out << ",g" << i;
  out << ",integrand\n";
  for (int j = 0; j <= f.segments(); ++j) {
    const double slope = f.slope(std::min(j, f.segments() - 1));
    const double integrand =
        local_rate_regime(f.values[j], g.g[j], slope, model, convention).rate +
        occupation_cost_density(g.g[j], model);
    out << format_number(j * f.step());
    for (int i = 0; i < d; ++i) out << ',' << format_number(g.g[j](i));
    out << ',' << format_number(integrand) << '\n';
  }
}

}  // namespace dyner
