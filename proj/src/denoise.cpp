#include "cbdn/denoise.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cbdn/codec.hpp"

namespace cbdn::denoise {

namespace {

double gaussian_nll(const Signal& c, const Signal& y, double sigma) {
  double quad = 0.0;
  for (std::size_t i = 0; i < y.dim(); ++i) {
    const double diff = y[i] - c[i];
    quad += diff * diff;
  }
  const double n = static_cast<double>(y.dim());
  return n * std::log(sigma * std::sqrt(2.0 * std::numbers::pi)) +
         quad / (2.0 * sigma * sigma);
}

double poisson_nll(const Signal& c, const Signal& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < y.dim(); ++i) {
    if (!(c[i] > 0.0)) {
      throw DomainError("neg_log_likelihood: Poisson rates must be positive");
    }
    if (y[i] < 0.0 || std::floor(y[i]) != y[i]) {
      throw DomainError(
          "neg_log_likelihood: Poisson observations must be non-negative "
          "integer counts");
    }
    acc += c[i] - y[i] * std::log(c[i]) + std::lgamma(y[i] + 1.0);
  }
  return acc;
}

}  // namespace

double neg_log_likelihood(const Signal& codeword, const Signal& y,
                          const NoiseSpec& noise) {
  if (codeword.dim() != y.dim()) {
    throw DimensionError("neg_log_likelihood: dimension mismatch (" +
                         std::to_string(codeword.dim()) + " vs " +
                         std::to_string(y.dim()) + ")");
  }
  return noise.is_gaussian() ? gaussian_nll(codeword, y, noise.sigma())
                             : poisson_nll(codeword, y);
}

Decision ml_denoise(const Codebook& cb, const Signal& y,
                    const NoiseSpec& noise) {
  if (y.dim() != cb.dim()) {
    throw DimensionError("ml_denoise: observation dimension mismatch");
  }
  if (noise.is_gaussian()) {
    // The Gaussian NLL is a fixed increasing function of the squared
    // distance, so the likelihood argmin IS the nearest-codeword scan.
    // Routing through the shared kernel keeps the two decision rules
    // bit-for-bit identical even on near-ties, where comparing rounded
    // NLL values could disagree with comparing distances.
    const std::size_t best = codec::nearest_codeword0(cb, y.span());
    return Decision{best + 1, cb.codewords()[best]};
  }
  const auto& cws = cb.codewords();
  std::size_t best = 0;
  double best_nll = neg_log_likelihood(cws[0], y, noise);
  for (std::size_t m = 1; m < cws.size(); ++m) {
    const double nll = neg_log_likelihood(cws[m], y, noise);
    if (nll < best_nll) {
      best_nll = nll;
      best = m;
    }
  }
  return Decision{best + 1, cws[best]};
}

Decision nn_denoise(const Codebook& cb, const Signal& y) {
  if (y.dim() != cb.dim()) {
    throw DimensionError("nn_denoise: observation dimension mismatch");
  }
  const std::size_t best = codec::nearest_codeword0(cb, y.span());
  return Decision{best + 1, cb.codewords()[best]};
}

}  // namespace cbdn::denoise
