#include "dyner/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dyner/errors.hpp"

namespace dyner {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

// log(k!) - [ (k + 1/2) log(k + 1) - (k + 1) + log(2 pi)/2 ]
double stirling_tail(double k) {
  static constexpr double kTail[] = {
      0.0810614667953272,  0.0413406959554092,  0.0276779256849983,
      0.02079067210376509, 0.0166446911898211,  0.0138761288230707,
      0.0118967099458917,  0.0104112652619720,  0.00925546218271273,
      0.00833056343336287};
  if (k <= 9) return kTail[static_cast<int>(k)];
  const double kp1sq = (k + 1) * (k + 1);
  return (1.0 / 12 - (1.0 / 360 - 1.0 / 1260 / kp1sq) / kp1sq) / (k + 1);
}

// Requires p <= 1/2.
std::int64_t binomial_inversion(CounterRng& rng, std::int64_t n, double p) {
  const double q = 1.0 - p;
  const double s = p / q;
  const double a = (static_cast<double>(n) + 1.0) * s;
  const double f0 = std::exp(static_cast<double>(n) * std::log1p(-p));
  for (;;) {
    double u = uniform01(rng);
    double f = f0;
    std::int64_t k = 0;
    while (u >= f) {
      u -= f;
      ++k;
      if (k > n) break;
      f *= a / static_cast<double>(k) - s;
    }
    if (k <= n) return k;
    // Round-off exhausted the mass; redraw.
  }
}

// Hormann (1993), "The generation of binomial random variates", BTRS.
// Requires p <= 1/2 and n*p >= 10.
std::int64_t binomial_btrs(CounterRng& rng, std::int64_t n_int, double p) {
  const double n = static_cast<double>(n_int);
  const double spq = std::sqrt(n * p * (1.0 - p));
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = n * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double r = p / (1.0 - p);
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double m = std::floor((n + 1.0) * p);
  for (;;) {
    const double u = uniform01(rng) - 0.5;
    double v = uniform01(rng);
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + c);
    if (k < 0 || k > n) continue;
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k);
    v = std::log(v * alpha / (a / (us * us) + b));
    const double bound =
        (m + 0.5) * std::log((m + 1.0) / (r * (n - m + 1.0))) +
        (n + 1.0) * std::log((n - m + 1.0) / (n - k + 1.0)) +
        (k + 0.5) * std::log(r * (n - k + 1.0) / (k + 1.0)) +
        stirling_tail(m) + stirling_tail(n - m) - stirling_tail(k) -
        stirling_tail(n - k);
    if (v <= bound) return static_cast<std::int64_t>(k);
  }
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(RngStream stream)
    : stream_(stream), key_(stream.seed) {}

CounterRng::CounterRng(std::uint64_t key, std::uint64_t index, int)
    : stream_{key, index}, key_(key) {}

CounterRng::result_type CounterRng::operator()() {
  if (used_ >= 4) {
    const std::array<std::uint32_t, 4> counter = {
        static_cast<std::uint32_t>(block_),
        static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_.index),
        static_cast<std::uint32_t>(stream_.index >> 32)};
    const std::array<std::uint32_t, 2> key = {
        static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)};
    buffer_ = philox4x32(counter, key);
    ++block_;
    used_ = 0;
  }
  const std::uint64_t lo = buffer_[used_];
  const std::uint64_t hi = buffer_[used_ + 1];
  used_ += 2;
  return lo | (hi << 32);
}

CounterRng CounterRng::substream(std::uint64_t child) const {
  const std::uint64_t key = splitmix64(key_ ^ splitmix64(stream_.index));
  return CounterRng(key, child, 0);
}

double uniform01(CounterRng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double exponential(CounterRng& rng, double rate) {
  return -std::log(uniform01(rng)) / rate;
}

double NormalSampler::operator()(CounterRng& rng) {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform01(rng)));
  const double angle = 2.0 * std::numbers::pi * uniform01(rng);
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::int64_t binomial(CounterRng& rng, std::int64_t n, double p) {
  require(n >= 0, "binomial: negative trial count");
  require(p >= 0.0 && p <= 1.0, "binomial: probability outside [0, 1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  const bool flip = p > 0.5;
  const double q = flip ? 1.0 - p : p;
  const std::int64_t k = static_cast<double>(n) * q < 30.0
                             ? binomial_inversion(rng, n, q)
                             : binomial_btrs(rng, n, q);
  return flip ? n - k : k;
}

DiscreteSampler::DiscreteSampler(std::span<const double> weights)
    : cumulative_(weights.size()) {
  require(!weights.empty(), "DiscreteSampler: no weights");
  std::partial_sum(weights.begin(), weights.end(), cumulative_.begin());
  require(cumulative_.back() > 0.0, "DiscreteSampler: zero total weight");
}

std::size_t DiscreteSampler::operator()(CounterRng& rng) const {
  const double target = uniform01(rng) * cumulative_.back();
  const auto it =
      std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  return std::min<std::size_t>(it - cumulative_.begin(),
                               cumulative_.size() - 1);
}

}  // namespace dyner
