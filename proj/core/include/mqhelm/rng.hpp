#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mqhelm {

// Deterministic random stream with an explicit bit-to-double mapping.
// std::uniform_real_distribution is implementation-defined, so generators
// that must be reproducible across toolchains use this instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in the open interval (0, 1).
  double uniform_open() {
    double u = uniform();
    while (u == 0.0) u = uniform();
    return u;
  }

  // Uniform in (lo, hi).
  double uniform_open(double lo, double hi) {
    return lo + (hi - lo) * uniform_open();
  }

  // Standard normal via Box-Muller (kept self-contained for determinism).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace mqhelm
