#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cbdn/core.hpp"

namespace cbdn::sim {

/// y = x + sigma * g, g standard normal from the library generator seeded
/// with `seed`. Identical (seed, x, sigma) give identical bytes.
Signal sample_awgn(const Signal& x, double sigma, std::uint64_t seed);

/// Per-trial seed derived from the master seed; trials are numbered from
/// 0 internally. Derivation is O(1) so trials can run in any order or in
/// parallel without shared generator state.
std::uint64_t derive_trial_seed(std::uint64_t master_seed,
                                std::uint64_t trial_index);

/// Quantile of the standard normal distribution (inverse CDF) for
/// p in (0,1). Rational initial guess refined by one Halley step; good to
/// roughly 1e-15.
double normal_quantile(double p);

/// Wilson score interval for a binomial proportion at the given two-sided
/// confidence level. successes == 0 pins the lower end to exactly 0,
/// successes == trials pins the upper end to exactly 1.
std::pair<double, double> wilson_interval(std::uint64_t successes,
                                          std::uint64_t trials,
                                          double confidence);

enum class SourceKind { Codewords, Samples };

/// Configuration of a denoising trial batch. The codebook (and for
/// SourceKind::Samples the clean pool) is borrowed and must outlive the
/// run. eta in (0,1) selects the envelope split; threads >= 1.
struct TrialConfig {
  const Codebook* codebook = nullptr;
  const std::vector<Signal>* clean_pool = nullptr;  // Samples source only
  SourceKind source = SourceKind::Codewords;
  double sigma = 1.0;
  double eta = 0.5;
  std::uint64_t n_trials = 0;
  std::uint64_t master_seed = 0;
  int threads = 1;
};

/// Everything random about one trial, recomputable from (config, index):
/// which clean signal was drawn and the noisy observation. Tests use this
/// to re-derive the noise vector and check per-trial identities.
struct TrialInputs {
  std::uint64_t source_id;  // 1-based codeword index or pool position
  Signal x;
  Signal y;
};

TrialInputs materialize_trial(const TrialConfig& cfg,
                              std::uint64_t trial_index);

struct TrialRecord {
  std::uint64_t trial;      // 1-based trial number
  std::uint64_t source_id;  // 1-based origin of the clean signal
  double err_norm;          // ||denoised - x||
  double dist_norm;         // ||decode(encode(x)) - x||
  double upper;             // dist_norm + margin
  bool violated;            // err_norm > upper
  bool decode_error;        // denoised index != encode(x)
};

struct TrialAggregates {
  double mean_err_sq = 0.0;
  double violation_rate = 0.0;
  double empirical_pe = 0.0;
  double wilson_low = 0.0;   // 95% Wilson interval on empirical_pe
  double wilson_high = 0.0;
  std::uint64_t n_violations = 0;
  std::uint64_t n_decode_errors = 0;
};

/// Full result of a trial batch. Scalars echo the configuration so the
/// serialized report is self-describing.
struct TrialReport {
  std::size_t dim = 0;
  unsigned rate_bits = 0;
  double sigma = 0.0;
  double eta = 0.0;
  std::uint64_t n_trials = 0;
  std::uint64_t master_seed = 0;
  SourceKind source = SourceKind::Codewords;
  double margin = 0.0;          // envelope margin at (sigma, rate, eta)
  double guarantee_prob = 0.0;  // envelope confidence level
  bool vacuous = false;         // eta * rate_bits <= 2
  TrialAggregates aggregates;
  std::vector<TrialRecord> trials;
};

/// Runs cfg.n_trials independent denoising trials. Each trial draws a
/// clean signal, adds white Gaussian noise, denoises by nearest codeword,
/// and checks the per-trial error envelope using that trial's own
/// quantization distance. Trials fill pre-allocated slots (OpenMP-parallel
/// over the trial index) and aggregates are reduced sequentially in trial
/// order, so reports are byte-identical for any thread count.
TrialReport run_denoise_trials(const TrialConfig& cfg);

struct PeEstimate {
  double estimate = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  std::uint64_t n_errors = 0;
  std::uint64_t n_trials = 0;
};

/// Monte Carlo decoding error probability: per trial, draw a codeword m
/// uniformly, observe y = (c_m - d) + noise, count trials whose nearest
/// codeword differs from m. The offset d has norm sqrt(dp_value) along
/// `direction` (pass nullptr or dp_value = 0 for no offset). Wilson bounds
/// at 95%.
PeEstimate empirical_pe(const Codebook& cb, const Signal* direction,
                        double dp_value, double sigma,
                        std::uint64_t n_trials, std::uint64_t master_seed,
                        int threads = 1);

/// Fixed-schema JSON rendering of a report (keys sorted, shortest
/// round-trip floats). include_trials appends the per-trial array.
std::string report_json(const TrialReport& report, bool include_trials);

/// CSV rendering, one row per trial:
///   trial,err_norm,dist_norm,upper,violated,decode_error
/// with booleans as 0/1.
std::string report_csv(const TrialReport& report);

}  // namespace cbdn::sim
