#pragma once

#include <cmath>
#include <cstdint>

namespace auvnav {

// Deterministic PRNG used everywhere randomness is needed. std:: distributions
// are implementation-defined, which would break byte-identical regeneration of
// datasets and models across toolchains, so the generator and the variate
// transforms are pinned here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Derives an independent stream from a master seed and a stream index.
  static Rng stream(std::uint64_t master_seed, std::uint64_t stream_id) {
    Rng mix(master_seed ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1)));
    mix.next_u64();
    return Rng(mix.next_u64());
  }

  std::uint64_t next_u64() {
    // SplitMix64 step
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  // Uniform integer in [0, bound). Lemire multiply-shift, bias < 2^-64.
  std::uint64_t bounded(std::uint64_t bound) {
    const std::uint64_t x = next_u64();
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(x) * bound) >> 64);
  }

  // Standard normal via Box-Muller; the spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace auvnav
