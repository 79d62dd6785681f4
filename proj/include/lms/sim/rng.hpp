#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace lms::sim {

/// mt19937_64 with variates derived by hand, so a seed means the same stream
/// on every standard library: uniform = top 53 bits / 2^53, normal by
/// Box-Muller (cosine branch, two uniforms per call).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<double>(hi - lo + 1);
    auto k = static_cast<std::int64_t>(uniform() * span);
    return lo + (k > hi - lo ? hi - lo : k);
  }
  double normal(double mean, double sd) {
    double u1 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  bool bernoulli(double p) { return p > 0.0 && uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lms::sim
