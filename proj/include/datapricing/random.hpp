#pragma once

// Portable random streams. std::*_distribution output differs between
// standard libraries, so variates are derived from raw engine bits here to
// keep traces byte-identical across platforms.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>

namespace datapricing {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Sub-seed for an independent stream, keyed by a short tag.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix64(seed ^ mix64(h));
}

/// Uniform in [0,1) with 53 random bits.
inline double unit_closed_open(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Uniform in (0,1] with 53 random bits.
inline double unit_open_closed(std::uint64_t bits) { return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53; }

/// Sequential generator backed by mt19937_64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return unit_closed_open(engine_()); }
  double uniform_open_closed() { return unit_open_closed(engine_()); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    // Rejection keeps the draw exactly uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Index drawn with probability proportional to weights (which sum to 1).
  std::size_t categorical(std::span<const double> weights) {
    const double u = uniform();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      last_positive = i;
      cumulative += weights[i];
      if (u < cumulative) return i;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

/// Counter-based stream: draw k is a pure function of (seed, k), so any
/// element can be regenerated without replaying the stream.
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t k) const { return mix64(seed_ + (k + 1) * 0x9e3779b97f4a7c15ULL); }

  /// Exponential variate with density rate * exp(-rate x), by inverse CDF.
  double exponential(std::uint64_t k, double rate) const { return -std::log(unit_open_closed(bits(k))) / rate; }

 private:
  std::uint64_t seed_;
};

}  // namespace datapricing
