#pragma once

#include "capcover/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace capcover {

// mt19937_64 with hand-rolled transforms so draws are bit-identical across
// standard libraries (std:: distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal, Marsaglia polar method.
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
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  // Uniform direction on S^{d-1}, embedded in R^3.
  Vec3 unit_vector(int d) {
    if (d == 2) {
      const double t = 2.0 * kPi * uniform();
      return {std::cos(t), std::sin(t), 0.0};
    }
    Vec3 g;
    double len = 0.0;
    do {
      g = {normal(), normal(), normal()};
      len = g.norm();
    } while (len < 1e-300);
    return g / len;
  }

  std::uint64_t below(std::uint64_t bound) {
    // Unbiased by rejection of the top partial block.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace capcover
