#include "dyner/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "dyner/csv.hpp"
#include "dyner/errors.hpp"

namespace dyner {

std::string_view to_string(PathKind kind) {
  switch (kind) {
    case PathKind::kRegimeAggregate: return "regime-aggregate";
    case PathKind::kRegimePerEdge: return "regime-per-edge";
    case PathKind::kResampleDiscrete: return "resample-discrete";
    case PathKind::kResampleContinuous: return "resample-continuous";
  }
  return "unknown";
}

const PathEvent& EdgeCountPath::state_at(double t) const {
  require(!events.empty() && t >= events.front().time,
          "EdgeCountPath: time precedes the first recorded state");
  auto it = std::upper_bound(
      events.begin(), events.end(), t,
      [](double value, const PathEvent& e) { return value < e.time; });
  return *std::prev(it);
}

double EdgeCountPath::time_average(double t0, double t1) const {
  require(t1 > t0 && t0 >= 0.0 && t1 <= horizon,
          "time_average: need 0 <= t0 < t1 <= horizon");
  double area = 0.0;
  for (std::size_t j = 0; j < events.size(); ++j) {
    const double a = std::max(t0, events[j].time);
    const double b =
        std::min(t1, j + 1 < events.size() ? events[j + 1].time : horizon);
    if (b > a) area += (b - a) * events[j].edges;
  }
  return area / (t1 - t0);
}

namespace {

// Appends either every state change or only the states seen at the requested
// observation times.
class Recorder {
 public:
  Recorder(EdgeCountPath& path, const std::vector<double>& observe)
      : path_(path), observe_(observe) {
    require(std::is_sorted(observe_.begin(), observe_.end()),
            "SimOptions: observe_times must be sorted");
  }

  void start(PathEvent initial) {
    current_ = initial;
    if (observe_.empty()) path_.events.push_back(initial);
  }

  void event(PathEvent next) {
    flush_before(next.time);
    current_ = next;
    if (observe_.empty()) path_.events.push_back(next);
  }

  void finish(double horizon) {
    while (next_ < observe_.size() && observe_[next_] <= horizon) emit();
    path_.horizon = horizon;
  }

 private:
  void flush_before(double t) {
    while (next_ < observe_.size() && observe_[next_] < t) emit();
  }
  void emit() {
    PathEvent seen = current_;
    seen.time = observe_[next_++];
    path_.events.push_back(seen);
  }

  EdgeCountPath& path_;
  const std::vector<double>& observe_;
  std::size_t next_ = 0;
  PathEvent current_;
};

int initial_regime(const RegimeModel& model, const SimOptions& options,
                   CounterRng& rng) {
  if (options.initial_regime >= 0) {
    require(options.initial_regime < model.regimes(),
            "SimOptions: initial_regime out of range");
    return options.initial_regime;
  }
  const Vector& pi = model.summary().pi;
  const DiscreteSampler pick(std::span<const double>(pi.data(), pi.size()));
  return static_cast<int>(pick(rng));
}

}  // namespace

EdgeCountPath simulate_regime_aggregate(const RegimeModel& model, double horizon,
                                        int y0, RngStream stream,
                                        const SimOptions& options) {
  const int n = model.edges();
  require(y0 >= 0 && y0 <= n, "simulate_regime_aggregate: y0 outside [0, N]");
  require(horizon >= 0.0, "simulate_regime_aggregate: negative horizon");
  CounterRng rng(stream);
  const Generator chain = model.effective_chain(options.scaling);
  const std::vector<DiscreteSampler> jumps = jump_samplers(chain);
  const Vector& lambda = model.lambda();
  const Vector& mu = model.mu();

  EdgeCountPath path;
  path.kind = PathKind::kRegimeAggregate;
  path.stream = stream;
  path.total_edges = n;
  Recorder recorder(path, options.observe_times);

  int x = initial_regime(model, options, rng);
  int y = y0;
  double t = 0.0;
  recorder.start({0.0, x, y});
  while (true) {
    const double birth = lambda(x) * (n - y);
    const double death = mu(x) * y;
    const double total = birth + death + chain.exit_rate(x);
    if (!(total > 0.0)) break;
    t += exponential(rng, total);
    if (t > horizon) break;
    const double u = uniform01(rng) * total;
    if (u < birth) {
      ++y;
    } else if (u < birth + death) {
      --y;
    } else {
      x = static_cast<int>(jumps[x](rng));
    }
    recorder.event({t, x, y});
  }
  recorder.finish(horizon);
  return path;
}

std::vector<EdgeToggle> simulate_edges_on_path(const RegimeModel& model,
                                               const RegimePath& regimes,
                                               int y0, const CounterRng& rng) {
  const int n = model.edges();
  require(y0 >= 0 && y0 <= n, "simulate_edges_on_path: y0 outside [0, N]");
  const Vector& lambda = model.lambda();
  const Vector& mu = model.mu();
  std::vector<EdgeToggle> toggles;
  for (int e = 0; e < n; ++e) {
    CounterRng edge_rng = rng.substream(static_cast<std::uint64_t>(e) + 1);
    bool on = e < y0;
    for (std::size_t j = 0; j < regimes.states.size(); ++j) {
      const double end = j + 1 < regimes.jump_times.size()
                             ? regimes.jump_times[j + 1]
                             : regimes.horizon;
      const int i = regimes.states[j];
      // Exponential clocks are memoryless, so restarting them at each regime
      // change is exact.
      double t = regimes.jump_times[j];
      while (true) {
        const double rate = on ? mu(i) : lambda(i);
        if (!(rate > 0.0)) break;
        t += exponential(edge_rng, rate);
        if (t >= end) break;
        on = !on;
        toggles.push_back({t, e});
      }
    }
  }
  std::sort(toggles.begin(), toggles.end(),
            [](const EdgeToggle& a, const EdgeToggle& b) {
              return a.time < b.time || (a.time == b.time && a.edge < b.edge);
            });
  return toggles;
}

EdgeCountPath simulate_regime_per_edge(const RegimeModel& model, double horizon,
                                       int y0, RngStream stream,
                                       const SimOptions& options) {
  const int n = model.edges();
  require(y0 >= 0 && y0 <= n, "simulate_regime_per_edge: y0 outside [0, N]");
  const CounterRng rng(stream);
  CounterRng regime_rng = rng.substream(0);
  const int x0 = initial_regime(model, options, regime_rng);
  const RegimePath regimes = sample_regime_path(
      model.effective_chain(options.scaling), horizon, regime_rng, x0);
  const std::vector<EdgeToggle> toggles =
      simulate_edges_on_path(model, regimes, y0, rng);

  EdgeCountPath path;
  path.kind = PathKind::kRegimePerEdge;
  path.stream = stream;
  path.total_edges = n;
  Recorder recorder(path, options.observe_times);

  std::vector<char> on(n);
  for (int e = 0; e < y0; ++e) on[e] = 1;
  int y = y0;
  std::size_t next_jump = 1;
  int x = regimes.states.front();
  recorder.start({0.0, x, y});
  for (const auto& [time, edge] : toggles) {
    while (next_jump < regimes.jump_times.size() &&
           regimes.jump_times[next_jump] < time) {
      x = regimes.states[next_jump];
      recorder.event({regimes.jump_times[next_jump], x, y});
      ++next_jump;
    }
    on[edge] = !on[edge];
    y += on[edge] ? 1 : -1;
    recorder.event({time, x, y});
  }
  for (; next_jump < regimes.jump_times.size(); ++next_jump) {
    x = regimes.states[next_jump];
    recorder.event({regimes.jump_times[next_jump], x, y});
  }
  recorder.finish(horizon);
  return path;
}

EdgeCountPath simulate_resample_discrete(const ResampleModel& model, int slots,
                                         int y0, RngStream stream,
                                         const SimOptions& options) {
  const int n = model.edges;
  require(y0 >= 0 && y0 <= n, "simulate_resample_discrete: y0 outside [0, N]");
  require(slots >= 0, "simulate_resample_discrete: negative slot count");
  CounterRng rng(stream);
  const auto& atoms = model.law.atoms();
  std::vector<double> weights;
  weights.reserve(atoms.size());
  for (const auto& atom : atoms) weights.push_back(atom.weight);
  const DiscreteSampler pick(weights);

  EdgeCountPath path;
  path.kind = PathKind::kResampleDiscrete;
  path.stream = stream;
  path.total_edges = n;
  Recorder recorder(path, options.observe_times);

  std::int64_t y = y0;
  recorder.start({0.0, -1, y0});
  for (int m = 1; m <= slots; ++m) {
    const std::size_t a = atoms.size() == 1 ? 0 : pick(rng);
    const TransitionAtom& atom = atoms[a];
    y = binomial(rng, y, atom.r) + binomial(rng, n - y, 1.0 - atom.p);
    recorder.event({static_cast<double>(m), static_cast<int>(a),
                    static_cast<int>(y)});
  }
  recorder.finish(static_cast<double>(slots));
  return path;
}

EdgeCountPath simulate_resample_continuous(const ContinuousResampleSpec& spec,
                                           int edges, double horizon, int y0,
                                           RngStream stream,
                                           const SimOptions& options) {
  const int n = edges;
  require(n >= 1, "simulate_resample_continuous: need N >= 1");
  require(y0 >= 0 && y0 <= n, "simulate_resample_continuous: y0 outside [0, N]");
  require(spec.period > 0.0, "simulate_resample_continuous: period must be > 0");
  require(horizon >= 0.0, "simulate_resample_continuous: negative horizon");
  CounterRng rng(stream);

  EdgeCountPath path;
  path.kind = PathKind::kResampleContinuous;
  path.stream = stream;
  path.total_edges = n;
  Recorder recorder(path, options.observe_times);

  int y = y0;
  recorder.start({0.0, 0, y});
  const auto slots =
      static_cast<std::int64_t>(std::ceil(horizon / spec.period - 1e-12));
  for (std::int64_t slot = 0; slot < slots; ++slot) {
    const double start = slot * spec.period;
    const double end = std::min(horizon, (slot + 1) * spec.period);
    const auto [up, down] = spec.lambda_mu.sample(rng);
    double t = start;
    while (true) {
      const double birth = up * (n - y);
      const double death = down * y;
      const double total = birth + death;
      if (!(total > 0.0)) break;
      t += exponential(rng, total);
      if (t >= end) break;
      y += uniform01(rng) * total < birth ? 1 : -1;
      recorder.event({t, static_cast<int>(slot), y});
    }
  }
  recorder.finish(horizon);
  return path;
}

Normalization Normalization::moments(double mean, double variance) {
  require(variance > 0.0, "Normalization: variance must be positive");
  const double sd = std::sqrt(variance);
  return {[mean](double) { return mean; }, [sd](double) { return sd; }};
}

Normalization Normalization::fluid(int edges, std::function<double(double)> rho,
                                   double exponent) {
  const double n = edges;
  const double scale = std::pow(n, exponent);
  return {[n, rho = std::move(rho)](double t) { return n * rho(t); },
          [scale](double) { return scale; }};
}

std::vector<double> values_at(const TrajectoryEnsemble& ensemble, double t) {
  std::vector<double> out;
  out.reserve(ensemble.size());
  for (const auto& path : ensemble.paths) {
    require(path.horizon >= t, "ensemble path does not cover the requested time");
    out.push_back(path.value_at(t));
  }
  return out;
}

EnsembleStats ensemble_stats(const TrajectoryEnsemble& ensemble,
                             std::span<const double> times,
                             const std::optional<Normalization>& normalization,
                             int bins) {
  if (ensemble.size() < 2) {
    fail(ErrorCode::kInsufficientReplications,
         "ensemble_stats: need at least 2 replications");
  }
  EnsembleStats stats;
  std::vector<double> previous;
  for (double t : times) {
    TimeStats entry;
    entry.t = t;
    std::vector<double> current = values_at(ensemble, t);
    entry.summary = summarize_sample(current);
    entry.lag1_cov = previous.empty()
                         ? std::nan("")
                         : sample_covariance(previous, current).covariance;
    entry.y_histogram = integer_histogram(current);
    if (normalization) {
      const double c = normalization->center(t);
      const double s = normalization->scale(t);
      entry.normalized.reserve(current.size());
      for (double y : current) entry.normalized.push_back((y - c) / s);
      const int count =
          bins > 0 ? bins : freedman_diaconis_bins(entry.normalized);
      entry.normalized_histogram = histogram(entry.normalized, count);
    }
    previous = std::move(current);
    stats.at.push_back(std::move(entry));
  }
  return stats;
}

void write_path_csv(std::ostream& out, const EdgeCountPath& path) {
  out << "time,regime,Y\n";
  for (const auto& e : path.events) {
    out << format_number(e.time) << ',' << e.regime << ',' << e.edges << '\n';
  }
}

void write_stats_csv(std::ostream& out, const EnsembleStats& stats) {
  out << "t,mean,var,cov1\n";
  for (const auto& entry : stats.at) {
    out << format_number(entry.t) << ',' << format_number(entry.summary.mean)
        << ',' << format_number(entry.summary.variance) << ','
        << format_number(entry.lag1_cov) << '\n';
  }
}

void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> bins) {
  out << "bin_lo,bin_hi,count\n";
  for (const auto& bin : bins) {
    out << format_number(bin.lo) << ',' << format_number(bin.hi) << ','
        << bin.count << '\n';
  }
}

}  // namespace dyner
