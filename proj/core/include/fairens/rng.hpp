#pragma once
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fairens {

/// splitmix64 step, used to derive independent seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministically combine a base seed with up to three indices.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a = 0,
                              std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64(s);
  s ^= a + 0x9E3779B97F4A7C15ull;
  h ^= splitmix64(s);
  s ^= b + 0xC2B2AE3D27D4EB4Full;
  h ^= splitmix64(s);
  s ^= c + 0x165667B19E3779F9ull;
  h ^= splitmix64(s);
  return h;
}

/// mt19937_64 wrapper with hand-rolled distributions so that sampled
/// sequences are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return (gen_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n) {
    // rejection sampling to avoid modulo bias
    std::uint64_t limit = ~0ull - (~0ull % n);
    std::uint64_t x;
    do { x = gen_(); } while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

  /// Standard normal via Box-Muller (caches the second draw).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Fisher-Yates shuffle, deterministic across platforms.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Draw an index with probability proportional to weights[i].
  /// cumulative must hold the inclusive prefix sums of the weights.
  std::size_t discrete(const std::vector<double>& cumulative) {
    double total = cumulative.back();
    double u = uniform01() * total;
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (cumulative[mid] <= u) lo = mid + 1; else hi = mid;
    }
    return lo;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fairens
