#pragma once

#include <cstddef>

#include "cbdn/core.hpp"

namespace cbdn::bounds {

/// Upper tail of the standard normal distribution,
/// Q(t) = erfc(t / sqrt 2) / 2. Accurate to machine precision for all
/// finite t; rejects NaN.
double q_function(double t);

/// High-probability envelope for the reconstruction error norm of
/// nearest-codeword denoising under white Gaussian noise.
struct BoundEnvelope {
  double lower;           ///< sqrt of the codec distortion-perception value
  double upper;           ///< lower + margin
  double guarantee_prob;  ///< 1 - 2^(2 - eta R), clamped to [0,1]
  bool vacuous;           ///< true when eta * rate_bits <= 2
};

/// Additive margin of the envelope: 2 sigma sqrt(2 ln2 R) (1 + 2 sqrt eta).
/// eta in (0,1) splits the rate between the two tail events behind the
/// guarantee probability.
double envelope_margin(double sigma, unsigned rate_bits, double eta);

/// Envelope for a codec whose distortion-perception value is dp_value:
///   lower = sqrt(dp_value), upper = lower + envelope_margin(...),
/// holding with probability at least guarantee_prob over the noise.
BoundEnvelope reconstruction_envelope(double dp_value, double sigma,
                                      unsigned rate_bits, double eta);

/// Probability that noise pushes the observation of x = c_m - d across the
/// decision hyperplane towards c_v:
///   Q( (||c_m - c_v|| / 2 + <d, (c_v - c_m)/||c_m - c_v||>) / sigma ).
/// Throws DegenerateCodewordsError when c_m == c_v.
double pairwise_error_prob(const Signal& cm, const Signal& cv,
                           const Signal& d, double sigma);

/// Union bound on the decoding error probability for a codeword drawn
/// uniformly from the codebook, observed at offset -d through AWGN:
///   min(1, (1/M) sum_m sum_{v != m} pairwise_error_prob(c_m, c_v, d)).
/// OpenMP-parallel over m; per-m partial sums are reduced sequentially in
/// index order, so any thread count yields identical doubles.
double union_bound_pe(const Codebook& cb, const Signal& d, double sigma,
                      int threads = 1);

/// Plain double-loop reference for union_bound_pe, kept for tests and
/// benchmarks.
double union_bound_pe_serial(const Codebook& cb, const Signal& d,
                             double sigma);

/// Union bound maximized over all offsets with ||d|| <= sqrt(dp_value):
/// each pairwise term is evaluated at the least favourable projection,
///   Q( (||c_m - c_v|| / 2 - sqrt(dp_value)) / sigma ).
/// Dominates union_bound_pe for every d of that norm.
double worst_case_union_bound(const Codebook& cb, double dp_value,
                              double sigma, int threads = 1);

/// Plain double-loop reference for worst_case_union_bound.
double worst_case_union_bound_serial(const Codebook& cb, double dp_value,
                                     double sigma);

}  // namespace cbdn::bounds
