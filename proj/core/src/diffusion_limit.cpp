#include "dyner/diffusion_limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "dyner/csv.hpp"
#include "dyner/errors.hpp"
#include "dyner/quadrature.hpp"
#include "dyner/statistics.hpp"

namespace dyner {

NoiseSelection noise_selection_for(double delta) {
  if (delta < 1.0) return NoiseSelection::kEnvironmentOnly;
  if (delta > 1.0) return NoiseSelection::kPoissonOnly;
  return NoiseSelection::kBoth;
}

double DiffusionSpec::rho(double t) const {
  return rho_bar * -std::expm1(-rate * t);
}

double DiffusionSpec::noise(double t) const {
  switch (selection) {
    case NoiseSelection::kEnvironmentOnly: return g_prime(t);
    case NoiseSelection::kPoissonOnly: return h_prime(t);
    case NoiseSelection::kBoth: break;
  }
  return g_prime(t) + h_prime(t);
}

double DiffusionSpec::noise_at_infinity() const {
  return noise(std::numeric_limits<double>::infinity());
}

double rho_t(const RegimeModel& model, double t) {
  require(t >= 0.0, "rho_t: t must be nonnegative");
  return model.rho_bar() * -std::expm1(-model.gamma_star() * t);
}

double rho_t(const ScaledResampleLaw& law, double t) {
  require(t >= 0.0, "rho_t: t must be nonnegative");
  const ScaledMoments m = scaled_moments(law);
  return m.rho_bar * -std::expm1(-m.rate * t);
}

DiffusionSpec build_diffusion_spec(const RegimeModel& model) {
  DiffusionSpec spec;
  spec.rate = model.gamma_star();
  spec.rho_bar = model.rho_bar();
  spec.v = scaled_variance_expansion(model).v;
  spec.selection = noise_selection_for(model.delta());

  const Vector pi = model.summary().pi;
  const Matrix deviation = model.summary().deviation;
  const Vector lambda = model.lambda();
  const Vector gamma = model.gamma();
  const double rate = spec.rate, rho_bar = spec.rho_bar;
  const double lambda_star = model.lambda_star(), mu_star = model.mu_star();
  auto rho = [rate, rho_bar](double t) { return rho_bar * -std::expm1(-rate * t); };

  spec.g_prime = [=](double t) {
    const Vector centered = lambda - rho(t) * gamma;
    return 2.0 * pi.cwiseProduct(centered).dot(deviation * centered);
  };
  spec.h_prime = [=](double t) {
    const double r = rho(t);
    return lambda_star * (1.0 - r) + mu_star * r;
  };
  return spec;
}

DiffusionSpec build_diffusion_spec(const ScaledResampleLaw& law) {
  const ScaledMoments scaled = scaled_moments(law);
  const PairMoments m = law.eta_zeta.moments();
  DiffusionSpec spec;
  spec.rate = scaled.rate;
  spec.rho_bar = scaled.rho_bar;
  spec.v = scaled.v;
  spec.selection = noise_selection_for(law.delta);
  const double rate = spec.rate, rho_bar = spec.rho_bar;
  auto rho = [rate, rho_bar](double t) { return rho_bar * -std::expm1(-rate * t); };

  // Var((1 - r) Lambda - r M).
  spec.g_prime = [=](double t) {
    const double r = rho(t);
    return (1.0 - r) * (1.0 - r) * m.var_a() - 2.0 * r * (1.0 - r) * m.cov() +
           r * r * m.var_b();
  };
  spec.h_prime = [=](double t) {
    const double r = rho(t);
    return m.mean_a * (1.0 - r) + m.mean_b * r;
  };
  return spec;
}

double fluctuation_variance(const DiffusionSpec& spec, double t) {
  require(t >= 0.0, "fluctuation_variance: t must be nonnegative");
  require(spec.rate > 0.0, "fluctuation_variance: rate must be positive");
  if (std::isinf(t)) return spec.noise_at_infinity() / (2.0 * spec.rate);
  if (t == 0.0) return 0.0;
  // Contributions from s < t - 40 / rate are below e^{-80}.
  const double lo = std::max(0.0, t - 40.0 / spec.rate);
  return adaptive_simpson(
      [&](double s) { return std::exp(-2.0 * spec.rate * (t - s)) * spec.noise(s); },
      lo, t, 1e-10);
}

OuPath simulate_ou(const DiffusionSpec& spec, double horizon,
                   const OuOptions& options, RngStream stream) {
  const double dt = options.dt;
  require(dt > 0.0 && horizon >= 0.0,
          "simulate_ou: need dt > 0 and horizon >= 0");
  if (dt * spec.rate >= 0.1) {
    fail(ErrorCode::kStepTooLarge, "simulate_ou: dt * rate must be below 0.1");
  }
  const auto& observe = options.observe_times;
  require(std::is_sorted(observe.begin(), observe.end()),
          "simulate_ou: observe_times must be sorted");
  CounterRng rng(stream);
  NormalSampler normal;
  OuPath path;
  const auto steps = static_cast<std::int64_t>(std::ceil(horizon / dt - 1e-9));
  std::size_t next = 0;
  auto record = [&](double t, double value) {
    if (observe.empty()) {
      path.times.push_back(t);
      path.values.push_back(value);
    }
  };

  double z = 0.0;
  double t = 0.0;
  record(0.0, 0.0);
  while (next < observe.size() && observe[next] <= 0.0) {
    path.times.push_back(observe[next++]);
    path.values.push_back(0.0);
  }
  for (std::int64_t k = 0; k < steps; ++k) {
    const double h = std::min(dt, horizon - t);
    const double intensity = std::max(0.0, spec.noise(t));
    const double next_z =
        z - spec.rate * z * h + std::sqrt(intensity * h) * normal(rng);
    const double next_t = k + 1 == steps ? horizon : t + h;
    // Observations between grid points take the left grid value.
    while (next < observe.size() && observe[next] < next_t) {
      path.times.push_back(observe[next++]);
      path.values.push_back(z);
    }
    z = next_z;
    t = next_t;
    record(t, z);
  }
  while (next < observe.size() && observe[next] <= horizon) {
    path.times.push_back(observe[next++]);
    path.values.push_back(z);
  }
  return path;
}

FcltDiscrepancy fclt_discrepancy(const TrajectoryEnsemble& ensemble,
                                 const DiffusionSpec& spec, int edges,
                                 double t) {
  if (ensemble.size() < 2) {
    fail(ErrorCode::kInsufficientReplications,
         "fclt_discrepancy: need at least 2 replications");
  }
  require(edges >= 1, "fclt_discrepancy: need N >= 1");
  const double n = edges;
  const double root = std::sqrt(n);
  const double center = n * spec.rho(t);
  std::vector<double> ybar;
  ybar.reserve(ensemble.size());
  for (double y : values_at(ensemble, t)) ybar.push_back((y - center) / root);

  const double sigma2 = fluctuation_variance(spec, t);
  require(sigma2 > 0.0, "fclt_discrepancy: limit variance vanishes at t");
  const double sd = std::sqrt(sigma2);
  FcltDiscrepancy out;
  out.ks = ks_normal_lattice(ybar, -center / root, 1.0 / root, 0.0, sd);
  out.ks_raw = ks_normal(ybar, 0.0, sd);
  out.var_ratio = summarize_sample(ybar).variance / sigma2;
  return out;
}

void write_diffusion_csv(std::ostream& out, const DiffusionSpec& spec,
                         std::span<const double> times) {
  out << "t,rho,gprime,hprime,sigma2\n";
  for (double t : times) {
    out << format_number(t) << ',' << format_number(spec.rho(t)) << ','
        << format_number(spec.g_prime(t)) << ','
        << format_number(spec.h_prime(t)) << ','
        << format_number(fluctuation_variance(spec, t)) << '\n';
  }
}

void write_ou_csv(std::ostream& out, const OuPath& path) {
  out << "time,regime,Y\n";
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    out << format_number(path.times[k]) << ",-1,"
        << format_number(path.values[k]) << '\n';
  }
}

}  // namespace dyner
