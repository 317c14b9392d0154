#include "cbdn/rng.hpp"

#include <cmath>
#include <numbers>

namespace cbdn::rng {

std::uint64_t SplitMix64::bounded(std::uint64_t n) noexcept {
  if (n < 2) return 0;
  // Smallest all-ones mask covering n-1, then reject out-of-range draws.
  std::uint64_t mask = n - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  mask |= mask >> 32;
  for (;;) {
    const std::uint64_t v = next() & mask;
    if (v < n) return v;
  }
}

std::uint64_t mix(std::uint64_t master, std::uint64_t index) noexcept {
  // One extra SplitMix64 output step on (master, index); decorrelates
  // neighbouring indices and neighbouring master seeds.
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

// One Box-Muller pair from two uniforms; u1 is kept away from zero so the
// log argument is valid.
inline void gaussian_pair(SplitMix64& g, double& z0, double& z1) noexcept {
  const double u1 = g.uniform01_positive();
  const double u2 = g.uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  z0 = r * std::cos(angle);
  z1 = r * std::sin(angle);
}

}  // namespace

void fill_gaussian(SplitMix64& g, std::span<double> out) noexcept {
  std::size_t i = 0;
  for (; i + 1 < out.size(); i += 2) gaussian_pair(g, out[i], out[i + 1]);
  if (i < out.size()) {
    double z0, z1;
    gaussian_pair(g, z0, z1);
    out[i] = z0;
  }
}

double gaussian(SplitMix64& g) noexcept {
  double z0, z1;
  gaussian_pair(g, z0, z1);
  return z0;
}

}  // namespace cbdn::rng
