#include "cbdn/rdp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace cbdn::rdp {

DpParams::DpParams(double d_star_, double p_star_)
    : d_star(d_star_), p_star(p_star_) {
  if (!(d_star >= 0.0) || !std::isfinite(d_star)) {
    throw DomainError("DpParams: d_star must be >= 0 and finite");
  }
  if (!(p_star >= 0.0) || !std::isfinite(p_star)) {
    throw DomainError("DpParams: p_star must be >= 0 and finite");
  }
}

double dp_function(const DpParams& params, double perception) {
  if (!(perception >= 0.0) || !std::isfinite(perception)) {
    throw DomainError("dp_function: perception level must be >= 0 and finite");
  }
  const double gap = params.p_star - perception;
  const double positive_part = gap > 0.0 ? gap : 0.0;
  return params.d_star + positive_part * positive_part;
}

DpParams gaussian_mmse_reference(double source_std, double noise_std) {
  if (!(source_std > 0.0) || !std::isfinite(source_std)) {
    throw DomainError("gaussian_mmse_reference: source_std must be positive");
  }
  if (!(noise_std > 0.0) || !std::isfinite(noise_std)) {
    throw DomainError("gaussian_mmse_reference: noise_std must be positive");
  }
  const double s2 = source_std * source_std;
  const double v2 = noise_std * noise_std;
  const double d_star = s2 * v2 / (s2 + v2);
  // The MMSE estimate is a Gaussian with standard deviation
  // s^2 / sqrt(s^2 + v^2); its W2 gap to the source is the (absolute)
  // difference of standard deviations.
  const double p_star = std::abs(source_std - s2 / std::sqrt(s2 + v2));
  return DpParams(d_star, p_star);
}

double wasserstein2_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw DomainError("wasserstein2_1d: empty sample set");
  }
  if (a.size() != b.size()) {
    throw DomainError("wasserstein2_1d: sample sets must have equal size");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  for (double v : sa) {
    if (!std::isfinite(v)) throw DomainError("wasserstein2_1d: non-finite sample");
  }
  for (double v : sb) {
    if (!std::isfinite(v)) throw DomainError("wasserstein2_1d: non-finite sample");
  }
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  // The optimal coupling on the line pairs equal ranks.
  double acc = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const double diff = sa[i] - sb[i];
    acc += diff * diff;
  }
  return std::sqrt(acc / static_cast<double>(sa.size()));
}

}  // namespace cbdn::rdp
