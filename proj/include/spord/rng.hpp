#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace spord {

// splitmix64 output function; good avalanche, used to spread seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic substream seed from a master seed and up to two stream indices.
// Chains, replicate draws and per-(draw, area) predictive streams all derive
// their seeds through this, so results do not depend on thread scheduling.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t s0, std::uint64_t s1 = 0) {
  std::uint64_t h = mix64(master ^ 0x8f1bbcdcbfa53e0bULL);
  h = mix64(h ^ (s0 * 0xd2b74407b1ce6e93ULL));
  h = mix64(h ^ (s1 * 0xca565b76a9a986ccULL));
  return h;
}

// Self-contained generator: mt19937_64 core with explicit uniform/normal
// transforms, so draws are reproducible independent of the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(mix64(seed)) {}

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the spare value is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double a = two_pi * uniform();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Unbiased uniform integer in [0, n), n > 0.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace spord
