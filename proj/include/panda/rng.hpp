#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace panda {

// 64-bit finalizer used to derive independent streams from (seed, index).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seedable generator with bit-reproducible uniform and normal draws.
// mt19937_64 core (standardized output), uniforms from the top 53 bits,
// normals via Box-Muller. Keeping the transforms in-house means traces do
// not depend on the standard library's distribution implementations.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Stateless stream derivation: the (seed, index) pair fully determines
  // the draw sequence.
  static SeededRng stream(std::uint64_t seed, std::uint64_t index) {
    SeededRng rng(0);
    rng.engine_.seed(splitmix64(seed) ^ splitmix64(index * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
    return rng;
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal(double mean, double stddev) { return mean + stddev * standard_normal(); }

  double standard_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  static constexpr const char* name() { return "mt19937_64/splitmix64/box-muller53"; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace panda
