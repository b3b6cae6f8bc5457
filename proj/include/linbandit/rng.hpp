#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>

namespace linbandit {

// SplitMix64 stream: output i is a fixed mix of (seed + i*gamma), so a stream
// is fully determined by its 64-bit key and position. Normal draws use
// Box-Muller (exactly two uniforms per pair), keeping the sequence portable
// across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t key) : state_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform on (0,1); never returns 0 so log() is safe
  double uniform01() { return (double((*this)() >> 12) + 0.5) * 0x1.0p-52; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double mag = std::sqrt(-2.0 * std::log(u1));
    double ang = 2.0 * std::numbers::pi * u2;
    spare_ = mag * std::sin(ang);
    has_spare_ = true;
    return mag * std::cos(ang);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class StreamRole : std::uint64_t {
  kPrior = 1,
  kNoise = 2,
  kPolicy = 3,
  kCheck = 4,
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// One key per (base seed, experiment, replication, role): replication results
// never depend on scheduling, and two configs differing only in policy share
// the same prior/noise streams (common random numbers).
inline std::uint64_t derive_key(std::uint64_t base_seed, std::uint64_t experiment_hash,
                                std::uint64_t replication, StreamRole role) {
  std::uint64_t k = detail::mix64(base_seed ^ 0xA0761D6478BD642FULL);
  k = detail::mix64(k ^ experiment_hash);
  k = detail::mix64(k ^ (replication * 0xE7037ED1A0B428DBULL));
  k = detail::mix64(k ^ static_cast<std::uint64_t>(role));
  return k;
}

inline Rng make_stream(std::uint64_t base_seed, std::uint64_t experiment_hash,
                       std::uint64_t replication, StreamRole role) {
  return Rng(derive_key(base_seed, experiment_hash, replication, role));
}

}  // namespace linbandit
