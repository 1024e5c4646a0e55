#ifndef DYNER_RNG_HPP
#define DYNER_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace dyner {

/// Philox4x32-10 block function (Salmon et al., SC'11).  Maps a 128-bit
/// counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Identifies one independent random stream: the root seed of an experiment
/// plus a stream index (typically the replication number).
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
};

/// Counter-based generator over a Philox stream.  The stream index occupies
/// the high half of the counter, so distinct (seed, index) pairs never share
/// counter values.  Satisfies std::uniform_random_bit_generator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(RngStream stream);
  CounterRng(std::uint64_t seed, std::uint64_t index)
      : CounterRng(RngStream{seed, index}) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Child stream with a key derived from this stream's (key, index); used for
  /// per-edge streams inside one replication.
  CounterRng substream(std::uint64_t child) const;

  RngStream stream() const { return stream_; }

 private:
  CounterRng(std::uint64_t key, std::uint64_t index, int);

  RngStream stream_;
  std::uint64_t key_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

/// Uniform on the open interval (0, 1), 53-bit resolution.
double uniform01(CounterRng& rng);

double exponential(CounterRng& rng, double rate);

/// Standard normal via Box-Muller; keeps the second variate of each pair.
class NormalSampler {
 public:
  double operator()(CounterRng& rng);

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Exact Binomial(n, p) draw: inversion when n*min(p, 1-p) < 30, otherwise
/// Hormann's BTRS transformed rejection.  Never a Normal approximation.
std::int64_t binomial(CounterRng& rng, std::int64_t n, double p);

/// Index drawn from the categorical law given by nonnegative weights.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> weights);
  std::size_t operator()(CounterRng& rng) const;
  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

}  // namespace dyner

#endif  // DYNER_RNG_HPP
