#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fedgraph {

// Deterministic RNG used everywhere stochastic behavior is needed. All draws
// go through our own bounded/normal routines on top of the raw mt19937_64
// stream, so sequences do not depend on the standard library's distribution
// implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1).
  double real01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, bound), bound > 0. Rejection sampling, no modulo bias.
  uint64_t bounded(uint64_t bound) {
    const uint64_t threshold = -bound % bound;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Box-Muller without a cached spare so the draw count per call is fixed.
  double normal(double mean, double stddev) {
    double u1;
    do {
      u1 = real01();
    } while (u1 <= 0.0);
    const double u2 = real01();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * mag * std::cos(6.28318530717958647692 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[bounded(i)]);
    }
  }

  // k distinct values from [0, n), sorted ascending. Partial Fisher-Yates.
  std::vector<uint32_t> sample_without_replacement(uint32_t n, uint32_t k) {
    k = std::min(k, n);
    std::vector<uint32_t> pool(n);
    for (uint32_t i = 0; i < n; ++i) pool[i] = i;
    for (uint32_t i = 0; i < k; ++i) {
      uint32_t j = i + static_cast<uint32_t>(bounded(n - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

 private:
  std::mt19937_64 gen_;
};

// splitmix64 finalizer; used to derive independent sub-seeds.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) { return mix64(mix64(a) ^ b); }
inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) {
  return mix64(mix_seed(a, b) ^ c);
}

}  // namespace fedgraph
