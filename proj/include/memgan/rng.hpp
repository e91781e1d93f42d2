#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace memgan {

// Deterministic stream splitting: a stream is identified by
// (master seed, label, index), so parallel tasks can own independent
// streams that do not depend on scheduling order. mt19937_64 is fully
// specified by the standard, which keeps streams portable.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : base_seed_(seed), eng_(seed) {}

  // Child stream identified by this stream's seed plus (label, index).
  // Pure function of identity, not of how much has been consumed.
  RandomStream derive(std::string_view label, std::uint64_t index = 0) const {
    std::uint64_t h = base_seed_;
    h = mix(h ^ fnv1a(label));
    h = mix(h ^ index);
    return RandomStream(mix(h));
  }

  std::uint64_t base_seed() const { return base_seed_; }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform in [0, n), rejection sampled to avoid modulo bias.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  double sign() { return (eng_() & 1u) ? 1.0 : -1.0; }

  // Box-Muller; the second variate of each pair is cached.
  double gaussian(double sigma = 1.0) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_ * sigma;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a) * sigma;
  }

 private:
  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  }

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::uint64_t base_seed_;
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace memgan
