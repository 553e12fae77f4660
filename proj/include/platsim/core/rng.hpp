#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>

namespace platsim {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x632BE59BD9B4E019ULL));
}

}  // namespace detail

/// Stream domains. A stream is keyed by (master seed, domain, id), so draws made
/// for one agent never shift another agent's sequence.
enum class StreamDomain : std::uint64_t {
  User = 1,
  Creator = 2,
  CreatorPolicy = 3,
  Ranker = 4,
  Synth = 5,
  Test = 6,
  RandomScore = 7,
};

/// Counter-based generator: output k is a pure function of (key, k).
/// Distribution helpers are implemented here rather than via <random> so that
/// sequences are identical across standard library implementations.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream() : RngStream(0, StreamDomain::Test, 0) {}
  RngStream(std::uint64_t seed, StreamDomain domain, std::uint64_t id)
      : seed_(seed),
        id_(id),
        key_(detail::mix_key(detail::mix_key(seed, static_cast<std::uint64_t>(domain)), id)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() { return detail::splitmix64(key_ + 0xD1B54A32D192ED03ULL * ++counter_); }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // Lemire's nearly-divisionless method.
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double normal(double mean = 0.0, double stddev = 1.0) {
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Index drawn with probability proportional to weights; uniform if all weights are zero.
  std::size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w > 0.0 ? w : 0.0;
    if (total <= 0.0) return static_cast<std::size_t>(below(weights.size()));
    double r = uniform() * total;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      last_positive = i;
      if (r < weights[i]) return i;
      r -= weights[i];
    }
    return last_positive;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t id() const { return id_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stateless uniform draw keyed by a tuple; used where a value must not depend on call order.
inline double keyed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  const std::uint64_t h = detail::mix_key(detail::mix_key(detail::mix_key(seed, a), b), c);
  return static_cast<double>(detail::splitmix64(h) >> 11) * 0x1.0p-53;
}

}  // namespace platsim
