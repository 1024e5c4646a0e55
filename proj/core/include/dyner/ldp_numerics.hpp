#ifndef DYNER_LDP_NUMERICS_HPP
#define DYNER_LDP_NUMERICS_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include "dyner/linalg.hpp"
#include "dyner/regime_analytics.hpp"
#include "dyner/resample_analytics.hpp"

namespace dyner {

/// Placement of the edge fraction x in the regime-model cumulant.
///  kBirthsOnVacant:  sum g_i ((1-x) lambda_i (e^t - 1) + x mu_i (e^-t - 1)),
///                    births proportional to vacant pairs as in the dynamics.
///  kBirthsOnOccupied: sum g_i (x lambda_i (e^t - 1) + (1-x) mu_i (e^-t - 1)),
///                    the alternative placement with the roles of x swapped.
enum class CumulantConvention { kBirthsOnVacant, kBirthsOnOccupied };

struct CumulantValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Behaviour of a cumulant as theta -> -inf / +inf.  When the derivative
/// stays bounded on one side its limit there is 0 and the cumulant tends to
/// the recorded finite value.
struct CumulantTails {
  bool lower_bounded = false;  // Lambda'(-inf) = 0 rather than -inf
  bool upper_bounded = false;  // Lambda'(+inf) = 0 rather than +inf
  double lower_value = 0.0;    // Lambda(-inf) when lower_bounded
  double upper_value = 0.0;    // Lambda(+inf) when upper_bounded
};

struct LocalRate {
  double rate = 0.0;
  double theta = 0.0;
  /// False when the supremum is approached only as |theta| -> inf (rate may
  /// still be finite at the edge of the range, or +inf outside it).
  bool finite_maximizer = true;
};

/// sup_theta (theta y - Lambda(theta)) for a convex cumulant, by safeguarded
/// Newton with bisection on [-50, 50].
LocalRate legendre_transform(const std::function<CumulantValue(double)>& cumulant,
                             const CumulantTails& tails, double y);

// --- regime-switching model -------------------------------------------------

/// Lambda = A (e^theta - 1) + B (e^-theta - 1).
struct RegimeCumulant {
  double births = 0.0;  // A
  double deaths = 0.0;  // B

  CumulantValue operator()(double theta) const;
  CumulantTails tails() const;
  double drift() const { return births - deaths; }
};

RegimeCumulant regime_cumulant(double x, const Vector& g,
                               const RegimeModel& model,
                               CumulantConvention convention =
                                   CumulantConvention::kBirthsOnVacant);

double cumulant_regime(double x, const Vector& g, double theta,
                       const RegimeModel& model,
                       CumulantConvention convention =
                           CumulantConvention::kBirthsOnVacant);

LocalRate local_rate_regime(double x, const Vector& g, double y,
                            const RegimeModel& model,
                            CumulantConvention convention =
                                CumulantConvention::kBirthsOnVacant);

/// sup_{u > 0} -sum_i g_i (Q u)_i / u_i, maximized over log u (where it is
/// concave) by damped Newton from 8 deterministic restarts.
double occupation_cost_density(const Vector& g, const RegimeModel& model);

/// d = 2 cross-check: golden-section search on log(u_2 / u_1).
double occupation_cost_density_ratio_search(const Vector& g,
                                            const RegimeModel& model);

// --- resampling model --------------------------------------------------------

/// Lambda_x(theta) = log E exp((1-x) eta (e^theta - 1) + x zeta (e^-theta - 1)).
struct ResampleCumulant {
  const PairLaw* law = nullptr;
  double x = 0.0;

  CumulantValue operator()(double theta) const;
  CumulantTails tails() const;
  double drift() const;
};

double cumulant_resample(double x, double theta, const ScaledResampleLaw& law);
LocalRate local_rate_resample(double x, double y, const ScaledResampleLaw& law);

// --- path functionals --------------------------------------------------------

/// Piecewise-linear f on a uniform grid over [0, horizon].
struct PathFunction {
  double horizon = 1.0;
  std::vector<double> values;

  int segments() const { return static_cast<int>(values.size()) - 1; }
  double step() const { return horizon / segments(); }
  double slope(int j) const { return (values[j + 1] - values[j]) / step(); }
};

/// Regime occupation g(s_j) at the grid points of a PathFunction.
struct OccupationProfile {
  std::vector<Vector> g;

  static OccupationProfile constant(const Vector& g, int points);
};

/// int I_{f(s)}(f'(s)) ds by the trapezoid rule on each segment.
double path_cost(const PathFunction& f, const ScaledResampleLaw& law);

/// int I_{f, g}(f') ds + int J(g) ds, both by the trapezoid rule.
double path_cost(const PathFunction& f, const RegimeModel& model,
                 const OccupationProfile& g,
                 CumulantConvention convention =
                     CumulantConvention::kBirthsOnVacant);

struct ProfileMinimum {
  double cost = 0.0;
  OccupationProfile g_star;
};

/// Pointwise-in-time minimization over g_1 in {0, 1/res, ..., 1} and pi_1
/// (d = 2; d = 1 is trivial).  Throws UnsupportedDimension for d > 2.
ProfileMinimum minimize_over_profiles(const PathFunction& f,
                                      const RegimeModel& model, int resolution,
                                      CumulantConvention convention =
                                          CumulantConvention::kBirthsOnVacant);

struct EndpointCost {
  double cost = 0.0;
  PathFunction path;
};

/// inf of the resampling path cost over piecewise-linear f with f(0) = x0 and
/// f(horizon) = target, `segments` pieces; coordinate-wise golden section.
EndpointCost minimize_endpoint_cost(const ScaledResampleLaw& law, double x0,
                                    double target, double horizon,
                                    int segments = 8);

void write_rate_table_csv(std::ostream& out, const ScaledResampleLaw& law,
                          const std::vector<double>& xs,
                          const std::vector<double>& ys);
void write_profile_csv(std::ostream& out, const PathFunction& f,
                       const RegimeModel& model, const OccupationProfile& g,
                       CumulantConvention convention =
                           CumulantConvention::kBirthsOnVacant);

}  // namespace dyner

#endif  // DYNER_LDP_NUMERICS_HPP
