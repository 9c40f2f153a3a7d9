#pragma once

// Deterministic random number utilities.
//
// The standard library engine (mt19937_64) is bit-reproducible everywhere,
// but the <random> *distributions* are not: their algorithms are left to the
// implementation. Every stochastic routine in this library therefore draws
// through the transforms below (53-bit canonical uniform, Box-Muller normal,
// Fisher-Yates shuffle), which pin results to the seed independent of the
// toolchain. Sub-streams for unrelated purposes (splitting rows, sampling
// graphs, ...) are derived from the user seed with splitmix64 so that the
// draws of one stage never shift the draws of another.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace swc {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Named sub-streams; the values only need to be distinct.
enum class SeedStream : std::uint64_t {
  split = 1,
  ensemble = 2,
  crossfit = 3,
  scm = 4,
  collider = 5,
  generic = 6,
};

inline std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(stream) * 0xD6E8FEB86659FD93ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the paired deviate is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Unbiased integer in [0, n) via rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below requires n > 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace swc
