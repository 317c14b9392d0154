#pragma once

#include <cstdint>
#include <span>

namespace cbdn::rng {

/// Identifier for the sampling recipe (seed mixing + Gaussian transform).
/// Reports embed it so archived results stay traceable if the recipe ever
/// changes. Bump the suffix when the stream layout changes.
inline constexpr const char* kGeneratorId = "splitmix64-boxmuller-v1";

/// SplitMix64 stream, constants from the reference implementation.
/// Chosen over std::mt19937 + std::normal_distribution because the
/// standard distributions are implementation-defined; this stream is
/// byte-reproducible across compilers and platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1), 53-bit resolution.
  double uniform01() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0,1]; safe as a log argument.
  double uniform01_positive() noexcept {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform integer in [0,n); masked rejection, no modulo bias.
  std::uint64_t bounded(std::uint64_t n) noexcept;

 private:
  std::uint64_t state_;
};

/// Stateless O(1) derivation of independent stream seeds from a master
/// seed, so parallel workers never share generator state.
std::uint64_t mix(std::uint64_t master, std::uint64_t index) noexcept;

/// Fills `out` with standard normal deviates via Box-Muller pairs. For odd
/// lengths the second member of the last pair is discarded.
void fill_gaussian(SplitMix64& g, std::span<double> out) noexcept;

/// Single standard normal deviate (draws a full pair, returns the first).
double gaussian(SplitMix64& g) noexcept;

}  // namespace cbdn::rng
