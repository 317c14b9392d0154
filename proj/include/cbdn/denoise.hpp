#pragma once

#include <cstddef>

#include "cbdn/core.hpp"

namespace cbdn::denoise {

/// Outcome of a denoising decision: the winning codeword and its 1-based
/// index.
struct Decision {
  std::size_t index;
  Signal codeword;
};

/// Exact negative log-likelihood of observing y when the clean signal is
/// the codeword c, including all constants.
///   Gaussian: n log(sigma sqrt(2 pi)) + sum (y_i - c_i)^2 / (2 sigma^2)
///   Poisson:  sum c_i - y_i log c_i + log Gamma(y_i + 1),
/// where the Poisson branch requires c_i > 0 and y_i a non-negative
/// integer count.
double neg_log_likelihood(const Signal& codeword, const Signal& y,
                          const NoiseSpec& noise);

/// Maximum-likelihood decision over the whole codebook: the codeword with
/// the smallest neg_log_likelihood, ties to the smallest index.
Decision ml_denoise(const Codebook& cb, const Signal& y,
                    const NoiseSpec& noise);

/// Nearest-codeword decision in Euclidean distance, ties to the smallest
/// index. For Gaussian noise this selects the same codeword as ml_denoise
/// at every sigma, because the Gaussian NLL is a fixed monotone function
/// of the squared distance.
Decision nn_denoise(const Codebook& cb, const Signal& y);

}  // namespace cbdn::denoise
