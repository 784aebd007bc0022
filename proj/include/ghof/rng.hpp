#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "ghof/common.hpp"

namespace ghof {

// Deterministic splitmix64 stream. Self-contained so that results do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform in {0, ..., n-1}; bias of n / 2^64 is irrelevant at our scales
  std::uint64_t uniform_index(std::uint64_t n) {
    return std::uint64_t((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // standard normal via Box-Muller, second value cached
  double normal() {
    if (has_cache_) {
      has_cache_ = false;
      return cache_;
    }
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    cache_ = r * std::sin(a);
    has_cache_ = true;
    return r * std::cos(a);
  }

  Vec3 normal3() { return Vec3(normal(), normal(), normal()); }

  Vec3 unit_vector() {
    for (;;) {
      Vec3 v = normal3();
      double n = v.norm();
      if (n > 1e-12) return v / n;
    }
  }

  // uniform in the closed unit ball: uniform direction, radius = U^(1/3)
  Vec3 ball_point() {
    double r = std::cbrt(uniform());
    return r * unit_vector();
  }

 private:
  std::uint64_t state_;
  double cache_ = 0.0;
  bool has_cache_ = false;
};

// Derives an independent stream from (seed, tag), for auxiliary sampling
// (evaluation points, held-out pairs) that must not perturb the main stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ seed;
  for (char c : tag) {
    h ^= std::uint64_t(static_cast<unsigned char>(c));
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace ghof
