#pragma once

#include "svtail/types.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

namespace svtail {

namespace detail {

// SplitMix64 finalizer; a bijection on 64-bit words with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

/// Address of one random stream. Distinct (trial_index, stream_label) pairs
/// name statistically independent streams; the same path always replays the
/// same sequence, independent of platform or thread schedule.
struct SeedPath {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
  std::string stream_label{};

  SeedPath with_trial(std::uint64_t t) const { return {master_seed, t, stream_label}; }

  SeedPath sub(std::string_view suffix) const {
    SeedPath p{master_seed, trial_index, stream_label};
    p.stream_label += '/';
    p.stream_label += suffix;
    return p;
  }

  std::uint64_t key() const {
    std::uint64_t h = detail::mix64(master_seed ^ 0x5BF03635472CA6A9ull);
    h = detail::mix64(h ^ trial_index);
    h = detail::mix64(h ^ detail::fnv1a(stream_label));
    return h;
  }
};

/// Counter-based generator: word i of a stream is mix64(key + i*golden),
/// i.e. SplitMix64 keyed by the SeedPath. Pure integer arithmetic, so the
/// raw stream is bit-identical everywhere; jumping to any counter is O(1).
///
/// Gaussians use the Marsaglia polar method (chosen once: it needs only
/// sqrt/log, and consumes a deterministic position-independent number of
/// uniforms per accepted pair given the stream).
class CounterRng {
 public:
  explicit CounterRng(const SeedPath& path) : key_(path.key()) {}
  explicit CounterRng(std::uint64_t raw_key) : key_(raw_key) {}

  std::uint64_t next_u64() { return detail::mix64(key_ + (counter_++) * detail::kGolden); }

  /// Uniform in [0,1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_unit() < p; }

  /// One pair of independent N_R(0,1) draws.
  std::pair<double, double> next_gaussian_pair() {
    double u, v, s;
    do {
      u = 2.0 * next_unit() - 1.0;
      v = 2.0 * next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    return {u * f, v * f};
  }

  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    auto [a, b] = next_gaussian_pair();
    spare_ = b;
    have_spare_ = true;
    return a;
  }

  /// N_C(0,1): independent real and imaginary parts of variance 1/2 each,
  /// so E|xi|^2 = 1.
  Complex next_complex_gaussian() {
    auto [a, b] = next_gaussian_pair();
    return {a * M_SQRT1_2, b * M_SQRT1_2};
  }

  Complex next_scalar(Field field) {
    if (field == Field::Complex) return next_complex_gaussian();
    return {next_gaussian(), 0.0};
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace svtail
