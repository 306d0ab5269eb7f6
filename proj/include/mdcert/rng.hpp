#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace mdcert {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t mix_in(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ splitmix64(v));
}

// Key of one cell variable: (seed, stream, lattice index, replica).
inline std::uint64_t cell_key(std::uint64_t seed, std::uint64_t stream,
                              std::span<const std::int64_t> z, std::uint64_t replica) {
  std::uint64_t h = mix_in(splitmix64(seed), stream);
  for (std::int64_t c : z) h = mix_in(h, static_cast<std::uint64_t>(c));
  return mix_in(h, replica);
}

// Counter-based generator: the i-th draw depends only on (key, i).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next() { return splitmix64(key_ ^ splitmix64(++ctr_)); }

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double exponential() { return -std::log(uniform()); }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace mdcert
