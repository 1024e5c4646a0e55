#ifndef DYNER_SIMULATOR_HPP
#define DYNER_SIMULATOR_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dyner/background_chain.hpp"
#include "dyner/regime_analytics.hpp"
#include "dyner/resample_analytics.hpp"
#include "dyner/rng.hpp"
#include "dyner/statistics.hpp"

namespace dyner {

enum class PathKind {
  kRegimeAggregate,
  kRegimePerEdge,
  kResampleDiscrete,
  kResampleContinuous,
};

std::string_view to_string(PathKind kind);

/// `regime` is the background state (regime models) or the slot index
/// (resampling models).
struct PathEvent {
  double time = 0.0;
  int regime = 0;
  int edges = 0;
};

/// Right-continuous edge-count path: events[j] holds on
/// [events[j].time, events[j+1].time).
struct EdgeCountPath {
  PathKind kind = PathKind::kRegimeAggregate;
  RngStream stream;
  int total_edges = 0;
  double horizon = 0.0;
  std::vector<PathEvent> events;

  const PathEvent& state_at(double t) const;
  int value_at(double t) const { return state_at(t).edges; }
  /// (1 / (t1 - t0)) * integral of Y over [t0, t1]; needs a full event list.
  double time_average(double t0, double t1) const;
};

struct SimOptions {
  Scaling scaling = Scaling::kUnscaled;
  /// Negative: X(0) ~ pi.
  int initial_regime = -1;
  /// Empty: record every event.  Otherwise record only the state at these
  /// (sorted) times, which keeps long runs small.
  std::vector<double> observe_times;
};

/// Gillespie simulation of (X, Y) with birth rate lambda_X (N - Y), death rate
/// mu_X Y and background jumps (sped up by N^delta when scaled).
EdgeCountPath simulate_regime_aggregate(const RegimeModel& model, double horizon,
                                        int y0, RngStream stream,
                                        const SimOptions& options = {});

struct EdgeToggle {
  double time = 0.0;
  int edge = 0;
};

/// On/off histories of the N edges driven by a common regime path; edges
/// [0, y0) start on.  Edge e draws from `rng.substream(e + 1)`.
std::vector<EdgeToggle> simulate_edges_on_path(const RegimeModel& model,
                                               const RegimePath& regimes,
                                               int y0, const CounterRng& rng);

/// Per-edge validation simulator: one regime path, N independent edges.
EdgeCountPath simulate_regime_per_edge(const RegimeModel& model, double horizon,
                                       int y0, RngStream stream,
                                       const SimOptions& options = {});

/// Y_m = Bin(Y_{m-1}, R_m) + Bin(N - Y_{m-1}, 1 - P_m), slots 1..slots at
/// times 1, 2, ...; regime column holds the drawn atom index.
EdgeCountPath simulate_resample_discrete(const ResampleModel& model, int slots,
                                         int y0, RngStream stream,
                                         const SimOptions& options = {});

/// (Lambda, M) redrawn from the pair law at the start of every period and held
/// fixed within it; Gillespie inside each slot.  Regime column: slot index.
EdgeCountPath simulate_resample_continuous(const ContinuousResampleSpec& spec,
                                           int edges, double horizon, int y0,
                                           RngStream stream,
                                           const SimOptions& options = {});

/// Replications i = 0..reps-1 run on streams (root_seed, i).
struct TrajectoryEnsemble {
  std::uint64_t root_seed = 0;
  std::vector<EdgeCountPath> paths;

  std::size_t size() const { return paths.size(); }
};

using PathTask = std::function<EdgeCountPath(RngStream)>;

/// Runs replications concurrently (`threads` = 0: hardware concurrency).
/// The result does not depend on the thread count.
TrajectoryEnsemble simulate_ensemble(std::uint64_t root_seed, std::size_t reps,
                                     const PathTask& task, unsigned threads = 0);

/// Ybar = (Y - center(t)) / scale(t).
struct Normalization {
  std::function<double(double)> center;
  std::function<double(double)> scale;

  /// (Y - E Y) / sqrt(Var Y).
  static Normalization moments(double mean, double variance);
  /// (Y(t) - N rho(t)) / N^{exponent}; exponent 1/2 is the usual CLT scaling.
  static Normalization fluid(int edges, std::function<double(double)> rho,
                             double exponent = 0.5);
};

struct TimeStats {
  double t = 0.0;
  SampleSummary summary;
  /// Covariance of Y at this time with Y at the previous requested time
  /// (NaN for the first time).
  double lag1_cov = 0.0;
  std::vector<HistogramBin> y_histogram;
  std::vector<double> normalized;
  std::vector<HistogramBin> normalized_histogram;
};

struct EnsembleStats {
  std::vector<TimeStats> at;
};

/// `bins` = 0 selects Freedman-Diaconis binning for the normalized histogram.
/// Throws InsufficientReplications for fewer than 2 paths.
EnsembleStats ensemble_stats(const TrajectoryEnsemble& ensemble,
                             std::span<const double> times,
                             const std::optional<Normalization>& normalization,
                             int bins = 0);

/// Y at time t of every path.
std::vector<double> values_at(const TrajectoryEnsemble& ensemble, double t);

void write_path_csv(std::ostream& out, const EdgeCountPath& path);
void write_stats_csv(std::ostream& out, const EnsembleStats& stats);
void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> bins);

}  // namespace dyner

#endif  // DYNER_SIMULATOR_HPP
