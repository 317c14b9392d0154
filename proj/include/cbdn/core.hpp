#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cbdn/errors.hpp"

namespace cbdn {

/// Largest supported codebook exponent; keeps 2^rate_bits comfortably
/// inside std::size_t and memory.
inline constexpr unsigned kMaxRateBits = 30;

/// Fixed-dimension real vector. Values are validated to be finite at
/// construction and never change afterwards, so instances can be shared
/// freely across threads.
class Signal {
 public:
  explicit Signal(std::vector<double> values);

  static Signal zeros(std::size_t dim);

  std::size_t dim() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::span<const double> span() const noexcept {
    return {values_.data(), values_.size()};
  }

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  std::vector<double> values_;
};

/// Memoryless per-component noise model. Gaussian carries a standard
/// deviation, Poisson a peak intensity; both strictly positive.
class NoiseSpec {
 public:
  enum class Kind { Gaussian, Poisson };

  static NoiseSpec gaussian(double sigma);
  static NoiseSpec poisson(double peak);

  Kind kind() const noexcept { return kind_; }
  bool is_gaussian() const noexcept { return kind_ == Kind::Gaussian; }
  double sigma() const;
  double peak() const;

 private:
  NoiseSpec(Kind kind, double param) : kind_(kind), param_(param) {}

  Kind kind_;
  double param_;
};

/// Ordered collection of exactly 2^rate_bits codewords of equal dimension.
/// Codeword indices are 1-based (m = 1..M) throughout the public
/// interface; internal scans use 0-based offsets.
class Codebook {
 public:
  Codebook(unsigned rate_bits, std::vector<Signal> codewords);

  std::size_t dim() const noexcept { return dim_; }
  unsigned rate_bits() const noexcept { return rate_bits_; }
  std::size_t size() const noexcept { return codewords_.size(); }

  /// 1-based lookup; throws IndexError outside 1..M.
  const Signal& codeword(std::size_t m) const;
  const std::vector<Signal>& codewords() const noexcept { return codewords_; }

 private:
  std::size_t dim_;
  unsigned rate_bits_;
  std::vector<Signal> codewords_;
};

/// Euclidean distance. Summation order is fixed left-to-right so repeated
/// runs produce identical doubles.
double l2_distance(const Signal& a, const Signal& b);

/// Dot product, fixed left-to-right summation.
double inner_product(const Signal& a, const Signal& b);

/// Squared Euclidean distance over raw spans; the primitive behind every
/// nearest-codeword scan. Callers guarantee equal lengths.
double squared_distance(std::span<const double> a,
                        std::span<const double> b) noexcept;

/// Shortest decimal string that parses back to the same double.
std::string double_repr(double v);

}  // namespace cbdn
