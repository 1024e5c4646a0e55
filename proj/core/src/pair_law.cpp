#include "dyner/pair_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dyner/errors.hpp"
#include "dyner/quadrature.hpp"

namespace dyner {

namespace {

// Unit uniform U on [0, 1] tilted by e^{cU}: log E e^{cU}, the tilted mean
// and the tilted variance.  Series below |c| = 0.1 avoid cancellation.
constexpr double kSeriesCutoff = 0.1;

double log_unit_mgf(double c) {
  if (std::fabs(c) < kSeriesCutoff) {
    const double c2 = c * c;
    return c / 2 + c2 / 24 - c2 * c2 / 2880 + c2 * c2 * c2 / 181440;
  }
  if (c > 0) return c + std::log(-std::expm1(-c)) - std::log(c);
  return std::log(std::expm1(c) / c);
}

double tilted_mean(double c) {
  if (std::fabs(c) < kSeriesCutoff) {
    const double c2 = c * c;
    return 0.5 + c / 12 - c * c2 / 720 + c * c2 * c2 / 30240 -
           c * c2 * c2 * c2 / 1209600;
  }
  return -1.0 / std::expm1(-c) - 1.0 / c;
}

double tilted_variance(double c) {
  if (std::fabs(c) < kSeriesCutoff) {
    const double c2 = c * c;
    return 1.0 / 12 - c2 / 240 + c2 * c2 / 6048 - c2 * c2 * c2 / 172800;
  }
  const double sh = std::sinh(0.5 * c);
  return 1.0 / (c * c) - 1.0 / (4.0 * sh * sh);
}

struct UniformCumulant {
  double value, d1, d2;
};

UniformCumulant uniform_cumulant(double s, double lo, double hi) {
  const double width = hi - lo;
  const double c = s * width;
  return {s * lo + log_unit_mgf(c), lo + width * tilted_mean(c),
          width * width * tilted_variance(c)};
}

}  // namespace

PairLaw PairLaw::atoms(std::vector<PairAtom> atoms) {
  require(!atoms.empty(), "PairLaw: need at least one atom");
  double total = 0.0;
  for (const auto& atom : atoms) {
    require(std::isfinite(atom.a) && std::isfinite(atom.b) && atom.a >= 0.0 &&
                atom.b >= 0.0,
            "PairLaw: atoms must be finite and nonnegative");
    require(atom.weight > 0.0, "PairLaw: atom weights must be positive");
    total += atom.weight;
  }
  require(std::fabs(total - 1.0) <= 1e-12, "PairLaw: weights must sum to 1");
  PairLaw law;
  law.atoms_ = std::move(atoms);
  law.a_lo_ = law.b_lo_ = std::numeric_limits<double>::infinity();
  law.a_hi_ = law.b_hi_ = 0.0;
  std::vector<double> weights;
  for (const auto& atom : law.atoms_) {
    weights.push_back(atom.weight);
    law.a_lo_ = std::min(law.a_lo_, atom.a);
    law.a_hi_ = std::max(law.a_hi_, atom.a);
    law.b_lo_ = std::min(law.b_lo_, atom.b);
    law.b_hi_ = std::max(law.b_hi_, atom.b);
  }
  law.picker_.emplace(weights);
  return law;
}

PairLaw PairLaw::independent_uniform(double a_lo, double a_hi, double b_lo,
                                     double b_hi) {
  require(std::isfinite(a_lo) && std::isfinite(a_hi) && std::isfinite(b_lo) &&
              std::isfinite(b_hi),
          "PairLaw: uniform bounds must be finite");
  require(0.0 <= a_lo && a_lo <= a_hi && 0.0 <= b_lo && b_lo <= b_hi,
          "PairLaw: uniform bounds must satisfy 0 <= lo <= hi");
  PairLaw law;
  law.uniform_ = true;
  law.a_lo_ = a_lo;
  law.a_hi_ = a_hi;
  law.b_lo_ = b_lo;
  law.b_hi_ = b_hi;
  return law;
}

PairMoments PairLaw::moments() const {
  PairMoments m;
  if (uniform_) {
    auto second = [](double lo, double hi) {
      return (lo * lo + lo * hi + hi * hi) / 3.0;
    };
    m.mean_a = 0.5 * (a_lo_ + a_hi_);
    m.mean_b = 0.5 * (b_lo_ + b_hi_);
    m.second_a = second(a_lo_, a_hi_);
    m.second_b = second(b_lo_, b_hi_);
    m.cross = m.mean_a * m.mean_b;
    return m;
  }
  for (const auto& atom : atoms_) {
    m.mean_a += atom.weight * atom.a;
    m.mean_b += atom.weight * atom.b;
    m.second_a += atom.weight * atom.a * atom.a;
    m.second_b += atom.weight * atom.b * atom.b;
    m.cross += atom.weight * atom.a * atom.b;
  }
  return m;
}

std::vector<PairAtom> PairLaw::discretize(int nodes) const {
  if (!uniform_) return atoms_;
  require(nodes >= 1, "PairLaw::discretize: need at least one node");
  auto rule = [nodes](double lo, double hi) {
    if (hi == lo) return QuadratureRule{{lo}, {1.0}};
    QuadratureRule r = gauss_legendre(nodes, lo, hi);
    for (double& w : r.weights) w /= (hi - lo);
    return r;
  };
  const QuadratureRule ra = rule(a_lo_, a_hi_);
  const QuadratureRule rb = rule(b_lo_, b_hi_);
  std::vector<PairAtom> out;
  out.reserve(ra.nodes.size() * rb.nodes.size());
  for (std::size_t i = 0; i < ra.nodes.size(); ++i) {
    for (std::size_t j = 0; j < rb.nodes.size(); ++j) {
      out.push_back({ra.nodes[i], rb.nodes[j], ra.weights[i] * rb.weights[j]});
    }
  }
  return out;
}

std::pair<double, double> PairLaw::sample(CounterRng& rng) const {
  if (uniform_) {
    const double a = a_lo_ + (a_hi_ - a_lo_) * uniform01(rng);
    const double b = b_lo_ + (b_hi_ - b_lo_) * uniform01(rng);
    return {a, b};
  }
  if (atoms_.size() == 1) return {atoms_[0].a, atoms_[0].b};
  const PairAtom& atom = atoms_[(*picker_)(rng)];
  return {atom.a, atom.b};
}

LogMgf PairLaw::log_mgf(double s, double t) const {
  LogMgf out;
  if (uniform_) {
    const UniformCumulant ka = uniform_cumulant(s, a_lo_, a_hi_);
    const UniformCumulant kb = uniform_cumulant(t, b_lo_, b_hi_);
    out.value = ka.value + kb.value;
    out.ds = ka.d1;
    out.dt = kb.d1;
    out.dss = ka.d2;
    out.dtt = kb.d2;
    return out;
  }
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& atom : atoms_) peak = std::max(peak, s * atom.a + t * atom.b);
  double z = 0.0, ea = 0.0, eb = 0.0, eaa = 0.0, eab = 0.0, ebb = 0.0;
  for (const auto& atom : atoms_) {
    const double w = atom.weight * std::exp(s * atom.a + t * atom.b - peak);
    z += w;
    ea += w * atom.a;
    eb += w * atom.b;
    eaa += w * atom.a * atom.a;
    eab += w * atom.a * atom.b;
    ebb += w * atom.b * atom.b;
  }
  out.value = peak + std::log(z);
  out.ds = ea / z;
  out.dt = eb / z;
  out.dss = eaa / z - out.ds * out.ds;
  out.dst = eab / z - out.ds * out.dt;
  out.dtt = ebb / z - out.dt * out.dt;
  return out;
}

PairLaw PairLaw::swapped() const {
  if (uniform_) return independent_uniform(b_lo_, b_hi_, a_lo_, a_hi_);
  std::vector<PairAtom> flipped;
  flipped.reserve(atoms_.size());
  for (const auto& atom : atoms_) flipped.push_back({atom.b, atom.a, atom.weight});
  return atoms(std::move(flipped));
}

}  // namespace dyner
