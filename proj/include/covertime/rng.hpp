#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace covertime {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Replica seeds depend only on (base seed, stream index), never on worker
// scheduling, so parallel runs reproduce bitwise.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base ^ (0x9E3779B97F4A7C15ull * (stream + 1));
  splitmix64_next(s);
  return splitmix64_next(s);
}

// All variate transforms are spelled out here (no std::*_distribution) so
// that output streams are identical across standard library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double exponential(double mean = 1.0) {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return -mean * std::log(u);
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // uniform index in [0, n); n is tiny (vertex degrees) so the 53-bit
  // multiply is bias-free for our purposes
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

  std::uint64_t poisson(double mean) {
    // split large means so the Knuth product never underflows
    std::uint64_t total = 0;
    while (mean > 60.0) {
      const double half = mean * 0.5;
      total += poisson(half);
      mean -= half;
    }
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return total + k - 1;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace covertime
