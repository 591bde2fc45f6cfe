// Deterministic random stream. The engine is std::mt19937_64 (bit-exact by
// standard), but the uniform/gaussian transforms are implemented here rather
// than via std::*_distribution, whose output is implementation-defined and
// would break reproducibility across standard libraries.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace softrank {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform double in (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double uniform_in(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller. Exactly two engine draws per call — no
  // cached second variate, so the draw count per sample stays predictable.
  double gaussian() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Bounded rejection sampling: unbiased and deterministic in the stream.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = eng_();
    while (x >= limit) x = eng_();
    return x % n;
  }

  std::uint64_t next() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// Derives an independent stream seed from a base seed and a stream tag, so
// the harness can hand disjoint streams to task generation, parameter init,
// and batch sampling without manual seed bookkeeping.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace softrank
