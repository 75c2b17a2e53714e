#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace orbit {

// Failure classes the CLI maps onto exit codes (2/3/4).
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NoRankGapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SearchExhaustedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Counter-based splittable RNG. Streams derived from (key, counter) pairs
/// only, so parallel consumers get reproducible, non-overlapping sequences
/// regardless of draw order.
class SeedStream {
 public:
  explicit SeedStream(uint64_t key) : key_(key) {}

  /// Independent child stream; deterministic in (parent key, idx).
  SeedStream split(uint64_t idx) const {
    return SeedStream(mix64(key_ ^ mix64(idx + 0x9E3779B97F4A7C15ull)));
  }

  uint64_t next_u64() { return mix64(key_ + 0x9E3779B97F4A7C15ull * ++ctr_); }

  /// Uniform in [0,1), 53-bit resolution.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; avoids std::normal_distribution so the
  /// byte stream is identical across standard libraries.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0,1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static uint64_t mix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  uint64_t key_;
  uint64_t ctr_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

}  // namespace orbit
