#pragma once

// Seeded random number generation with a documented, platform-stable
// algorithm. Every random quantity in the library flows from a root seed
// through derive_seed(root, path...), so independent components (layers,
// trials, perturbation draws) get reproducible, non-overlapping streams.
//
// Core generator: splitmix64 (Steele, Lea, Vigna). Gaussian variates via
// Box-Muller on explicitly constructed 53-bit uniforms; we deliberately do
// not use std::normal_distribution, whose output is implementation-defined.

#include <cstdint>
#include <cmath>
#include <string_view>

namespace rnf {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a over the bytes of a path label, used to salt child seeds.
inline std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Child seed for a named component: mixes the parent seed with the label
// hash and an index, then scrambles through splitmix64 once.
inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view label,
                                 std::uint64_t index = 0) {
  std::uint64_t s = parent ^ hash_label(label) ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n) by rejection-free 128-bit multiply (Lemire)
  std::uint64_t uniform_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(
                    uniform_below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rnf
