#include "cbdn/core.hpp"

#include <charconv>
#include <cmath>
#include <string>
#include <utility>

namespace cbdn {

namespace {

void check_finite(const std::vector<double>& values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw DomainError(std::string(what) + ": non-finite value");
    }
  }
}

}  // namespace

Signal::Signal(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("Signal: dimension must be >= 1");
  check_finite(values_, "Signal");
}

Signal Signal::zeros(std::size_t dim) {
  if (dim == 0) throw DomainError("Signal: dimension must be >= 1");
  return Signal(std::vector<double>(dim, 0.0));
}

NoiseSpec NoiseSpec::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("NoiseSpec: sigma must be positive and finite");
  }
  return NoiseSpec(Kind::Gaussian, sigma);
}

NoiseSpec NoiseSpec::poisson(double peak) {
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    throw DomainError("NoiseSpec: peak must be positive and finite");
  }
  return NoiseSpec(Kind::Poisson, peak);
}

double NoiseSpec::sigma() const {
  if (kind_ != Kind::Gaussian) {
    throw DomainError("NoiseSpec: sigma is only defined for Gaussian noise");
  }
  return param_;
}

double NoiseSpec::peak() const {
  if (kind_ != Kind::Poisson) {
    throw DomainError("NoiseSpec: peak is only defined for Poisson noise");
  }
  return param_;
}

Codebook::Codebook(unsigned rate_bits, std::vector<Signal> codewords)
    : rate_bits_(rate_bits), codewords_(std::move(codewords)) {
  if (rate_bits_ < 1 || rate_bits_ > kMaxRateBits) {
    throw DomainError("Codebook: rate_bits must be in 1.." +
                      std::to_string(kMaxRateBits));
  }
  const std::size_t expected = std::size_t{1} << rate_bits_;
  if (codewords_.size() != expected) {
    throw DomainError("Codebook: expected " + std::to_string(expected) +
                      " codewords for rate_bits=" + std::to_string(rate_bits_) +
                      ", got " + std::to_string(codewords_.size()));
  }
  dim_ = codewords_.front().dim();
  for (const Signal& c : codewords_) {
    if (c.dim() != dim_) {
      throw DimensionError("Codebook: codewords have mixed dimensions");
    }
  }
}

const Signal& Codebook::codeword(std::size_t m) const {
  if (m < 1 || m > codewords_.size()) {
    throw IndexError("Codebook: index " + std::to_string(m) +
                     " outside 1.." + std::to_string(codewords_.size()));
  }
  return codewords_[m - 1];
}

double squared_distance(std::span<const double> a,
                        std::span<const double> b) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

double l2_distance(const Signal& a, const Signal& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("l2_distance: dimension mismatch (" +
                         std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()) + ")");
  }
  return std::sqrt(squared_distance(a.span(), b.span()));
}

double inner_product(const Signal& a, const Signal& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("inner_product: dimension mismatch (" +
                         std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()) + ")");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
  return acc;
}

std::string double_repr(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace cbdn
