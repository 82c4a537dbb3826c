#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace fracspec::rng {

/// Deterministic random stream; draws are identical across platforms
/// (raw mt19937_64 words, never std distributions).
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : eng_(seed) {}

  /// uniform in [0, 1) with 53 significant bits
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// standard normal via Box-Muller on the portable uniform
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = uniform();
    while (u == 0.0) u = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double t = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// radical-inverse (Halton) point, index >= 0, base a small prime
inline double halton(std::uint64_t index, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  for (std::uint64_t i = index + 1; i > 0; i /= base) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
  }
  return r;
}

}  // namespace fracspec::rng
