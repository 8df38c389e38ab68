#pragma once

#include <cmath>
#include <cstdint>

namespace covpath {

// Counter-based deterministic generator (SplitMix64 finalizer over
// key + counter). Each subsystem gets its own stream so that, e.g.,
// map generation draws never perturb the training noise sequence.
class Rng {
 public:
  Rng() = default;
  Rng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(seed ^ 0x5851F42D4C957F2DULL, stream)) {}

  std::uint64_t next_u64() { return mix(key_, counter_++); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    // Modulo bias is < 2^-53 for any n we use; not worth a rejection loop.
    return n > 0 ? next_u64() % n : 0;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; consumes two counters per draw so the
  // stream position stays a pure function of the draw count.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  static std::uint64_t mix(std::uint64_t key, std::uint64_t ctr) {
    std::uint64_t z = key + ctr * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0x9E3779B97F4A7C15ULL;
  std::uint64_t counter_ = 0;
};

// Stream ids for the independent per-subsystem generators.
namespace rng_stream {
inline constexpr std::uint64_t kMapGen = 1;
inline constexpr std::uint64_t kDynamicsNoise = 2;
inline constexpr std::uint64_t kTraining = 3;
inline constexpr std::uint64_t kInit = 4;
inline constexpr std::uint64_t kEpisode = 5;
}  // namespace rng_stream

}  // namespace covpath
