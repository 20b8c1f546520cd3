#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rrmgame {

/// Seeded generator. The engine is std::mt19937_64 (fully specified by the
/// standard); the helpers below avoid the implementation-defined std::
/// distributions so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

 private:
  std::mt19937_64 engine_;
};

/// Sub-stream seeds derived from one scenario seed.
enum class Stream : std::uint64_t {
  Traffic = 1,
  Attacker = 2,
  Mutation = 3,
  Schedule = 4,
};

inline std::uint64_t sub_seed(std::uint64_t seed, Stream s) {
  return seed + 1'000'003ULL * static_cast<std::uint64_t>(s);
}

}  // namespace rrmgame
