#include "cbdn/bounds.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace cbdn::bounds {

namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("sigma must be positive and finite");
  }
}

void check_dp_value(double dp_value) {
  if (!(dp_value >= 0.0) || !std::isfinite(dp_value)) {
    throw DomainError("distortion-perception value must be >= 0 and finite");
  }
}

void check_threads(int threads) {
  if (threads < 1) throw DomainError("threads must be >= 1");
}

// Shared skeleton of the two union bounds. `proj_term(m, v, dist)` is the
// signed shift added to the half-distance. Rows (fixed m, all v != m)
// accumulate into disjoint slots, OpenMP-parallel over m; the row totals
// are then reduced sequentially in index order, so results are identical
// doubles for any thread count. A degenerate pair is flagged inside the
// loop and thrown after it, keeping exceptions out of the parallel region.
template <typename ProjTerm>
double union_bound_impl(const Codebook& cb, double sigma, int threads,
                        ProjTerm proj_term) {
  const auto& cws = cb.codewords();
  const auto m_count = static_cast<std::int64_t>(cws.size());
  std::vector<double> rows(cws.size(), 0.0);
  std::atomic<bool> degenerate{false};
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t mi = 0; mi < m_count; ++mi) {
    const auto m = static_cast<std::size_t>(mi);
    double acc = 0.0;
    for (std::size_t v = 0; v < cws.size(); ++v) {
      if (v == m) continue;
      const double dist =
          std::sqrt(squared_distance(cws[m].span(), cws[v].span()));
      if (dist == 0.0) {
        degenerate.store(true, std::memory_order_relaxed);
        break;
      }
      acc += q_function((dist / 2.0 + proj_term(m, v, dist)) / sigma);
    }
    rows[m] = acc;
  }
  if (degenerate.load()) {
    throw DegenerateCodewordsError("union bound: two codewords coincide");
  }
  double total = 0.0;
  for (double r : rows) total += r;
  const double pe = total / static_cast<double>(cws.size());
  return pe < 1.0 ? pe : 1.0;
}

}  // namespace

double q_function(double t) {
  if (std::isnan(t)) throw DomainError("q_function: NaN argument");
  return 0.5 * std::erfc(t / std::numbers::sqrt2);
}

double envelope_margin(double sigma, unsigned rate_bits, double eta) {
  check_sigma(sigma);
  if (rate_bits < 1) {
    throw DomainError("envelope_margin: rate_bits must be >= 1");
  }
  if (!(eta > 0.0) || !(eta < 1.0)) {
    throw DomainError("envelope_margin: eta must lie strictly in (0,1)");
  }
  const double rate = static_cast<double>(rate_bits);
  return 2.0 * sigma * std::sqrt(2.0 * std::numbers::ln2 * rate) *
         (1.0 + 2.0 * std::sqrt(eta));
}

BoundEnvelope reconstruction_envelope(double dp_value, double sigma,
                                      unsigned rate_bits, double eta) {
  check_dp_value(dp_value);
  const double margin = envelope_margin(sigma, rate_bits, eta);
  const double lower = std::sqrt(dp_value);
  const double exponent = 2.0 - eta * static_cast<double>(rate_bits);
  double guarantee = 1.0 - std::exp2(exponent);
  if (guarantee < 0.0) guarantee = 0.0;
  return BoundEnvelope{lower, lower + margin, guarantee, exponent >= 0.0};
}

double pairwise_error_prob(const Signal& cm, const Signal& cv,
                           const Signal& d, double sigma) {
  if (cm.dim() != cv.dim() || cm.dim() != d.dim()) {
    throw DimensionError("pairwise_error_prob: dimension mismatch");
  }
  check_sigma(sigma);
  const double dist = std::sqrt(squared_distance(cm.span(), cv.span()));
  if (dist == 0.0) {
    throw DegenerateCodewordsError("pairwise_error_prob: codewords coincide");
  }
  // <d, c_v - c_m> accumulated left-to-right, normalized once.
  double proj = 0.0;
  for (std::size_t i = 0; i < d.dim(); ++i) proj += d[i] * (cv[i] - cm[i]);
  proj /= dist;
  return q_function((dist / 2.0 + proj) / sigma);
}

double union_bound_pe(const Codebook& cb, const Signal& d, double sigma,
                      int threads) {
  check_threads(threads);
  if (d.dim() != cb.dim()) {
    throw DimensionError("union_bound_pe: offset dimension mismatch");
  }
  check_sigma(sigma);
  const auto& cws = cb.codewords();
  return union_bound_impl(
      cb, sigma, threads, [&](std::size_t m, std::size_t v, double dist) {
        const Signal& cm = cws[m];
        const Signal& cv = cws[v];
        double proj = 0.0;
        for (std::size_t i = 0; i < d.dim(); ++i) {
          proj += d[i] * (cv[i] - cm[i]);
        }
        return proj / dist;
      });
}

double union_bound_pe_serial(const Codebook& cb, const Signal& d,
                             double sigma) {
  if (d.dim() != cb.dim()) {
    throw DimensionError("union_bound_pe_serial: offset dimension mismatch");
  }
  check_sigma(sigma);
  const auto& cws = cb.codewords();
  double total = 0.0;
  for (std::size_t m = 0; m < cws.size(); ++m) {
    for (std::size_t v = 0; v < cws.size(); ++v) {
      if (v == m) continue;
      total += pairwise_error_prob(cws[m], cws[v], d, sigma);
    }
  }
  const double pe = total / static_cast<double>(cws.size());
  return pe < 1.0 ? pe : 1.0;
}

double worst_case_union_bound(const Codebook& cb, double dp_value,
                              double sigma, int threads) {
  check_threads(threads);
  check_dp_value(dp_value);
  check_sigma(sigma);
  const double shift = -std::sqrt(dp_value);
  return union_bound_impl(
      cb, sigma, threads,
      [shift](std::size_t, std::size_t, double) { return shift; });
}

double worst_case_union_bound_serial(const Codebook& cb, double dp_value,
                                     double sigma) {
  check_dp_value(dp_value);
  check_sigma(sigma);
  const double root = std::sqrt(dp_value);
  const auto& cws = cb.codewords();
  double total = 0.0;
  for (std::size_t m = 0; m < cws.size(); ++m) {
    for (std::size_t v = 0; v < cws.size(); ++v) {
      if (v == m) continue;
      const double dist =
          std::sqrt(squared_distance(cws[m].span(), cws[v].span()));
      if (dist == 0.0) {
        throw DegenerateCodewordsError(
            "worst_case_union_bound_serial: codewords coincide");
      }
      total += q_function((dist / 2.0 - root) / sigma);
    }
  }
  const double pe = total / static_cast<double>(cws.size());
  return pe < 1.0 ? pe : 1.0;
}

}  // namespace cbdn::bounds
