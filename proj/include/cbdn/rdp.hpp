#pragma once

#include <span>

#include "cbdn/errors.hpp"

namespace cbdn::rdp {

/// Parameters of a distortion-perception trade-off curve: d_star is the
/// unconstrained MMSE floor, p_star the perception index reached by the
/// MMSE estimator. Both non-negative and finite.
struct DpParams {
  DpParams(double d_star_, double p_star_);

  double d_star;
  double p_star;
};

/// Minimal mean squared error achievable at perception level P:
///   D(P) = d_star + max(0, p_star - P)^2.
/// Non-increasing in P, saturating at d_star once P >= p_star.
double dp_function(const DpParams& params, double perception);

/// Closed-form reference point for a scalar Gaussian source with standard
/// deviation source_std observed through Gaussian noise with standard
/// deviation noise_std:
///   d_star = s^2 v^2 / (s^2 + v^2),  p_star = |s - s^2 / sqrt(s^2 + v^2)|.
DpParams gaussian_mmse_reference(double source_std, double noise_std);

/// Order-2 Wasserstein distance between two equal-size empirical
/// distributions on the line: sort both, root-mean-square the paired
/// differences. Inputs must be non-empty, equal length, and finite.
double wasserstein2_1d(std::span<const double> a, std::span<const double> b);

}  // namespace cbdn::rdp
