#include "cbdn/sim.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"

#include "cbdn/bounds.hpp"
#include "cbdn/codec.hpp"
#include "cbdn/rng.hpp"

namespace cbdn::sim {

namespace {

void check_threads(int threads) {
  if (threads < 1) throw DomainError("threads must be >= 1");
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("sigma must be positive and finite");
  }
}

void validate_config(const TrialConfig& cfg) {
  if (cfg.codebook == nullptr) {
    throw DomainError("trial config: codebook is required");
  }
  check_sigma(cfg.sigma);
  if (!(cfg.eta > 0.0) || !(cfg.eta < 1.0)) {
    throw DomainError("trial config: eta must lie strictly in (0,1)");
  }
  if (cfg.n_trials < 1) {
    throw DomainError("trial config: n_trials must be >= 1");
  }
  check_threads(cfg.threads);
  if (cfg.source == SourceKind::Samples) {
    if (cfg.clean_pool == nullptr || cfg.clean_pool->empty()) {
      throw DomainError("trial config: samples source needs a non-empty pool");
    }
    for (const Signal& s : *cfg.clean_pool) {
      if (s.dim() != cfg.codebook->dim()) {
        throw DimensionError("trial config: pool dimension mismatch");
      }
    }
  }
}

}  // namespace

Signal sample_awgn(const Signal& x, double sigma, std::uint64_t seed) {
  check_sigma(sigma);
  rng::SplitMix64 g(seed);
  std::vector<double> noise(x.dim());
  rng::fill_gaussian(g, noise);
  std::vector<double> y(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) y[i] = x[i] + sigma * noise[i];
  return Signal(std::move(y));
}

std::uint64_t derive_trial_seed(std::uint64_t master_seed,
                                std::uint64_t trial_index) {
  return rng::mix(master_seed, trial_index);
}

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw DomainError("normal_quantile: p must lie strictly in (0,1)");
  }
  // Acklam's rational approximation, then one Halley step against the
  // exact Gaussian CDF; accurate to ~1e-15 over the open interval.
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double err = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u =
      err * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

std::pair<double, double> wilson_interval(std::uint64_t successes,
                                          std::uint64_t trials,
                                          double confidence) {
  if (trials == 0) throw DomainError("wilson_interval: trials must be >= 1");
  if (successes > trials) {
    throw DomainError("wilson_interval: successes exceed trials");
  }
  if (!(confidence > 0.0) || !(confidence < 1.0)) {
    throw DomainError("wilson_interval: confidence must lie in (0,1)");
  }
  const double z = normal_quantile(0.5 + confidence / 2.0);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  double low = center - half;
  double high = center + half;
  // The exact interval ends are 0 and 1 at the boundary counts; pin them
  // so rounding in the expressions above cannot leak past the boundary.
  if (successes == 0) low = 0.0;
  if (successes == trials) high = 1.0;
  if (low < 0.0) low = 0.0;
  if (high > 1.0) high = 1.0;
  return {low, high};
}

namespace {

// Stream layout of one trial: the derived per-trial generator first picks
// the clean signal, then hands an independent seed to the noise sampler.
// materialize_trial and the batch runner both go through here, so tests
// can reconstruct exactly what any trial saw.
TrialInputs materialize_unchecked(const TrialConfig& cfg,
                                  std::uint64_t trial_index) {
  rng::SplitMix64 g(derive_trial_seed(cfg.master_seed, trial_index));
  const Signal* x = nullptr;
  std::uint64_t id0;
  if (cfg.source == SourceKind::Codewords) {
    id0 = g.bounded(cfg.codebook->size());
    x = &cfg.codebook->codewords()[static_cast<std::size_t>(id0)];
  } else {
    id0 = g.bounded(cfg.clean_pool->size());
    x = &(*cfg.clean_pool)[static_cast<std::size_t>(id0)];
  }
  const std::uint64_t noise_seed = g.next();
  Signal y = sample_awgn(*x, cfg.sigma, noise_seed);
  return TrialInputs{id0 + 1, *x, std::move(y)};
}

// Body shared by all trials; reads only immutable state, writes its slot.
TrialRecord run_one_trial(const TrialConfig& cfg, std::uint64_t index,
                          double margin) {
  const Codebook& cb = *cfg.codebook;
  const TrialInputs in = materialize_unchecked(cfg, index);
  const std::size_t den0 = codec::nearest_codeword0(cb, in.y.span());
  const std::size_t enc0 = codec::nearest_codeword0(cb, in.x.span());
  const double err_norm =
      std::sqrt(squared_distance(cb.codewords()[den0].span(), in.x.span()));
  const double dist_norm =
      std::sqrt(squared_distance(cb.codewords()[enc0].span(), in.x.span()));
  const double upper = dist_norm + margin;
  return TrialRecord{index + 1, in.source_id,     err_norm, dist_norm,
                     upper,     err_norm > upper, den0 != enc0};
}

}  // namespace

TrialInputs materialize_trial(const TrialConfig& cfg,
                              std::uint64_t trial_index) {
  validate_config(cfg);
  return materialize_unchecked(cfg, trial_index);
}

TrialReport run_denoise_trials(const TrialConfig& cfg) {
  validate_config(cfg);
  const Codebook& cb = *cfg.codebook;
  const double margin =
      bounds::envelope_margin(cfg.sigma, cb.rate_bits(), cfg.eta);
  const bounds::BoundEnvelope env =
      bounds::reconstruction_envelope(0.0, cfg.sigma, cb.rate_bits(), cfg.eta);

  std::vector<TrialRecord> records(cfg.n_trials);
  const auto n = static_cast<std::int64_t>(cfg.n_trials);
#pragma omp parallel for num_threads(cfg.threads) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    records[static_cast<std::size_t>(i)] =
        run_one_trial(cfg, static_cast<std::uint64_t>(i), margin);
  }

  // Sequential reduction in trial order.
  TrialAggregates agg;
  double err_sq_sum = 0.0;
  for (const TrialRecord& r : records) {
    err_sq_sum += r.err_norm * r.err_norm;
    if (r.violated) ++agg.n_violations;
    if (r.decode_error) ++agg.n_decode_errors;
  }
  const double n_d = static_cast<double>(cfg.n_trials);
  agg.mean_err_sq = err_sq_sum / n_d;
  agg.violation_rate = static_cast<double>(agg.n_violations) / n_d;
  agg.empirical_pe = static_cast<double>(agg.n_decode_errors) / n_d;
  const auto [lo, hi] =
      wilson_interval(agg.n_decode_errors, cfg.n_trials, 0.95);
  agg.wilson_low = lo;
  agg.wilson_high = hi;

  TrialReport report;
  report.dim = cb.dim();
  report.rate_bits = cb.rate_bits();
  report.sigma = cfg.sigma;
  report.eta = cfg.eta;
  report.n_trials = cfg.n_trials;
  report.master_seed = cfg.master_seed;
  report.source = cfg.source;
  report.margin = margin;
  report.guarantee_prob = env.guarantee_prob;
  report.vacuous = env.vacuous;
  report.aggregates = agg;
  report.trials = std::move(records);
  return report;
}

PeEstimate empirical_pe(const Codebook& cb, const Signal* direction,
                        double dp_value, double sigma,
                        std::uint64_t n_trials, std::uint64_t master_seed,
                        int threads) {
  check_threads(threads);
  check_sigma(sigma);
  if (!(dp_value >= 0.0) || !std::isfinite(dp_value)) {
    throw DomainError("empirical_pe: dp_value must be >= 0 and finite");
  }
  if (n_trials < 1) throw DomainError("empirical_pe: n_trials must be >= 1");
  // Offset applied to every transmitted codeword: sqrt(dp_value) along
  // the given direction, or zero when dp_value == 0.
  std::vector<double> d(cb.dim(), 0.0);
  if (dp_value > 0.0) {
    if (direction == nullptr) {
      throw DomainError("empirical_pe: dp_value > 0 needs a direction");
    }
    if (direction->dim() != cb.dim()) {
      throw DimensionError("empirical_pe: direction dimension mismatch");
    }
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < cb.dim(); ++i) {
      norm_sq += (*direction)[i] * (*direction)[i];
    }
    const double norm = std::sqrt(norm_sq);
    if (norm == 0.0) {
      throw DomainError("empirical_pe: direction must be non-zero");
    }
    const double scale = std::sqrt(dp_value) / norm;
    for (std::size_t i = 0; i < cb.dim(); ++i) {
      d[i] = (*direction)[i] * scale;
    }
  }

  std::vector<unsigned char> error_flags(n_trials, 0);
  const auto n = static_cast<std::int64_t>(n_trials);
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    rng::SplitMix64 g(
        derive_trial_seed(master_seed, static_cast<std::uint64_t>(i)));
    const auto m0 = static_cast<std::size_t>(g.bounded(cb.size()));
    const std::uint64_t noise_seed = g.next();
    const Signal& cm = cb.codewords()[m0];
    std::vector<double> x(cb.dim());
    for (std::size_t j = 0; j < cb.dim(); ++j) x[j] = cm[j] - d[j];
    const Signal y = sample_awgn(Signal(std::move(x)), sigma, noise_seed);
    error_flags[static_cast<std::size_t>(i)] =
        codec::nearest_codeword0(cb, y.span()) != m0 ? 1 : 0;
  }

  std::uint64_t n_errors = 0;
  for (unsigned char f : error_flags) n_errors += f;
  const auto [lo, hi] = wilson_interval(n_errors, n_trials, 0.95);
  return PeEstimate{static_cast<double>(n_errors) /
                        static_cast<double>(n_trials),
                    lo, hi, n_errors, n_trials};
}

namespace {

const char* source_name(SourceKind source) {
  return source == SourceKind::Codewords ? "codewords" : "samples";
}

nlohmann::json trial_to_json(const TrialRecord& r) {
  return nlohmann::json{
      {"trial", r.trial},          {"source_id", r.source_id},
      {"err_norm", r.err_norm},    {"dist_norm", r.dist_norm},
      {"upper", r.upper},          {"violated", r.violated},
      {"decode_error", r.decode_error}};
}

}  // namespace

std::string report_json(const TrialReport& report, bool include_trials) {
  nlohmann::json agg{
      {"mean_err_sq", report.aggregates.mean_err_sq},
      {"violation_rate", report.aggregates.violation_rate},
      {"empirical_pe", report.aggregates.empirical_pe},
      {"wilson_low", report.aggregates.wilson_low},
      {"wilson_high", report.aggregates.wilson_high},
      {"n_violations", report.aggregates.n_violations},
      {"n_decode_errors", report.aggregates.n_decode_errors}};
  nlohmann::json j{{"dim", report.dim},
                   {"rate_bits", report.rate_bits},
                   {"sigma", report.sigma},
                   {"eta", report.eta},
                   {"n_trials", report.n_trials},
                   {"seed", report.master_seed},
                   {"source", source_name(report.source)},
                   {"generator", rng::kGeneratorId},
                   {"margin", report.margin},
                   {"guarantee_prob", report.guarantee_prob},
                   {"vacuous_guarantee", report.vacuous},
                   {"aggregates", std::move(agg)}};
  if (include_trials) {
    nlohmann::json trials = nlohmann::json::array();
    for (const TrialRecord& r : report.trials) {
      trials.push_back(trial_to_json(r));
    }
    j["trials"] = std::move(trials);
  }
  return j.dump();
}

std::string report_csv(const TrialReport& report) {
  std::string out = "trial,err_norm,dist_norm,upper,violated,decode_error\n";
  for (const TrialRecord& r : report.trials) {
    out += std::to_string(r.trial);
    out += ',';
    out += double_repr(r.err_norm);
    out += ',';
    out += double_repr(r.dist_norm);
    out += ',';
    out += double_repr(r.upper);
    out += ',';
    out += r.violated ? '1' : '0';
    out += ',';
    out += r.decode_error ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace cbdn::sim
