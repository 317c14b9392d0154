// cbdn: codebook denoising toolkit.
//
// Subcommands build codebooks from sample files or image patches, run the
// Monte Carlo bound-verification harness, estimate and bound decoding
// error probabilities, tabulate distortion-perception curves, and denoise
// PGM images patch-wise.
//
// Exit codes: 0 success, 2 usage or domain error, 3 file I/O or format
// error.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <system_error>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cbdn/bounds.hpp"
#include "cbdn/codec.hpp"
#include "cbdn/core.hpp"
#include "cbdn/imagelab.hpp"
#include "cbdn/rdp.hpp"
#include "cbdn/sim.hpp"

namespace {

using cbdn::Codebook;
using cbdn::Signal;

std::vector<Signal> parse_csv_signals(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw cbdn::FormatError("cannot open samples file " + path.string());
  }
  std::vector<Signal> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t arity = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> values;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string field = line.substr(
          start, comma == std::string::npos ? std::string::npos
                                            : comma - start);
      const std::size_t b = field.find_first_not_of(" \t");
      const std::size_t e = field.find_last_not_of(" \t");
      if (b == std::string::npos) {
        throw cbdn::FormatError(path.string() + ":" + std::to_string(lineno) +
                                ": empty field");
      }
      field = field.substr(b, e - b + 1);
      double v = 0.0;
      const char* first = field.data();
      const char* last = field.data() + field.size();
      auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
        throw cbdn::FormatError(path.string() + ":" + std::to_string(lineno) +
                                ": not a finite number: '" + field + "'");
      }
      values.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (arity == 0) {
      arity = values.size();
    } else if (values.size() != arity) {
      throw cbdn::FormatError(path.string() + ":" + std::to_string(lineno) +
                              ": expected " + std::to_string(arity) +
                              " fields, got " + std::to_string(values.size()));
    }
    rows.push_back(Signal(std::move(values)));
  }
  if (rows.empty()) {
    throw cbdn::FormatError("no samples in " + path.string());
  }
  return rows;
}

// PSNR can be +infinity (identical images); JSON has no literal for that,
// so it is serialized as the string "inf".
nlohmann::json psnr_value(double v) {
  if (std::isinf(v)) return nlohmann::json("inf");
  return nlohmann::json(v);
}

struct BuildOpts {
  std::string input;
  std::string out;
  unsigned rate = 0;
  std::string method = "lloyd";
  std::uint64_t seed = 0;
  std::size_t iters = 50;
  double tol = 1e-6;
  std::size_t patch = 0;  // 0: CSV samples; >0: PGM input, k x k patches
  std::size_t stride = 1;
  int threads = 1;
};

int run_codebook_build(const BuildOpts& o) {
  std::vector<Signal> training;
  if (o.patch > 0) {
    const auto img = cbdn::imagelab::read_pgm(o.input);
    training = cbdn::imagelab::extract_patches(img, o.patch, o.stride);
  } else {
    training = parse_csv_signals(o.input);
  }
  Codebook cb = [&] {
    if (o.method == "random") {
      return cbdn::codec::build_random_codebook(training, o.rate, o.seed);
    }
    return cbdn::codec::lloyd_codebook(training, o.rate, o.iters, o.tol,
                                       o.seed, o.threads)
        .codebook;
  }();
  cbdn::codec::save_codebook(cb, o.out);
  nlohmann::json j{
      {"dim", cb.dim()},
      {"rate_bits", cb.rate_bits()},
      {"method", o.method},
      {"training_samples", training.size()},
      {"training_distortion",
       cbdn::codec::codebook_distortion(cb, training, o.threads)}};
  std::cout << j.dump() << "\n";
  return 0;
}

struct VerifyOpts {
  std::string codebook;
  double sigma = 0.0;
  double eta = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::string source = "codewords";
  std::string samples;
  std::string format = "json";
  bool per_trial = false;
  int threads = 1;
};

int run_verify_bounds(const VerifyOpts& o) {
  const Codebook cb = cbdn::codec::load_codebook(o.codebook);
  std::vector<Signal> pool;
  cbdn::sim::TrialConfig cfg;
  cfg.codebook = &cb;
  cfg.sigma = o.sigma;
  cfg.eta = o.eta;
  cfg.n_trials = o.trials;
  cfg.master_seed = o.seed;
  cfg.threads = o.threads;
  if (o.source == "samples") {
    if (o.samples.empty()) {
      throw cbdn::DomainError("--source samples requires --samples FILE");
    }
    pool = parse_csv_signals(o.samples);
    cfg.clean_pool = &pool;
    cfg.source = cbdn::sim::SourceKind::Samples;
  }
  const cbdn::sim::TrialReport report = cbdn::sim::run_denoise_trials(cfg);
  if (report.vacuous) {
    std::cerr << "warning: eta * rate_bits <= 2, the guarantee probability "
                 "is 0 and the bound is vacuous at this rate\n";
  }
  if (o.format == "csv") {
    std::cout << cbdn::sim::report_csv(report);
  } else {
    std::cout << cbdn::sim::report_json(report, o.per_trial) << "\n";
  }
  return 0;
}

struct PeOpts {
  std::string codebook;
  double sigma = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double dp = 0.0;
  std::string direction;
  std::string format = "json";
  int threads = 1;
};

int run_pe(const PeOpts& o) {
  const Codebook cb = cbdn::codec::load_codebook(o.codebook);
  std::vector<Signal> dir_rows;
  const Signal* dir = nullptr;
  if (!o.direction.empty()) {
    dir_rows = parse_csv_signals(o.direction);
    if (dir_rows.size() != 1) {
      throw cbdn::FormatError("direction file must hold exactly one row");
    }
    dir = &dir_rows.front();
  }
  const cbdn::sim::PeEstimate est = cbdn::sim::empirical_pe(
      cb, dir, o.dp, o.sigma, o.trials, o.seed, o.threads);
  // The same offset the trials used, for the analytic bound.
  std::vector<double> d(cb.dim(), 0.0);
  if (o.dp > 0.0) {
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < cb.dim(); ++i) {
      norm_sq += (*dir)[i] * (*dir)[i];
    }
    const double scale = std::sqrt(o.dp) / std::sqrt(norm_sq);
    for (std::size_t i = 0; i < cb.dim(); ++i) d[i] = (*dir)[i] * scale;
  }
  const double union_bound =
      cbdn::bounds::union_bound_pe(cb, Signal(std::move(d)), o.sigma,
                                   o.threads);
  const double worst_case =
      cbdn::bounds::worst_case_union_bound(cb, o.dp, o.sigma, o.threads);
  if (o.format == "csv") {
    std::cout << "empirical_pe,wilson_low,wilson_high,union_bound,"
                 "worst_case_bound\n"
              << cbdn::double_repr(est.estimate) << ','
              << cbdn::double_repr(est.wilson_low) << ','
              << cbdn::double_repr(est.wilson_high) << ','
              << cbdn::double_repr(union_bound) << ','
              << cbdn::double_repr(worst_case) << "\n";
  } else {
    nlohmann::json j{{"empirical_pe", est.estimate},
                     {"wilson_low", est.wilson_low},
                     {"wilson_high", est.wilson_high},
                     {"union_bound", union_bound},
                     {"worst_case_bound", worst_case}};
    std::cout << j.dump() << "\n";
  }
  return 0;
}

struct DpCurveOpts {
  double dstar = -1.0;
  double pstar = -1.0;
  bool have_dstar = false;
  bool have_pstar = false;
  std::vector<double> gaussian_ref;
  std::size_t points = 100;
  double pmax = -1.0;
  bool have_pmax = false;
};

int run_dp_curve(const DpCurveOpts& o) {
  const bool manual = o.have_dstar || o.have_pstar;
  if (manual && !o.gaussian_ref.empty()) {
    throw cbdn::DomainError(
        "--dstar/--pstar and --gaussian-ref are mutually exclusive");
  }
  if (manual && !(o.have_dstar && o.have_pstar)) {
    throw cbdn::DomainError("--dstar and --pstar must be given together");
  }
  if (!manual && o.gaussian_ref.empty()) {
    throw cbdn::DomainError(
        "either --dstar/--pstar or --gaussian-ref is required");
  }
  const cbdn::rdp::DpParams params =
      manual ? cbdn::rdp::DpParams(o.dstar, o.pstar)
             : cbdn::rdp::gaussian_mmse_reference(o.gaussian_ref[0],
                                                  o.gaussian_ref[1]);
  if (o.points < 1) throw cbdn::DomainError("--points must be >= 1");
  double pmax = o.have_pmax
                    ? o.pmax
                    : (params.p_star > 0.0 ? 2.0 * params.p_star : 1.0);
  if (!(pmax >= 0.0) || !std::isfinite(pmax)) {
    throw cbdn::DomainError("--pmax must be >= 0 and finite");
  }
  std::string out = "P,D\n";
  for (std::size_t j = 0; j < o.points; ++j) {
    const double p =
        o.points == 1 ? 0.0
                      : pmax * static_cast<double>(j) /
                            static_cast<double>(o.points - 1);
    out += cbdn::double_repr(p);
    out += ',';
    out += cbdn::double_repr(cbdn::rdp::dp_function(params, p));
    out += '\n';
  }
  std::cout << out;
  return 0;
}

struct DenoiseImageOpts {
  std::string in;
  std::string codebook;
  std::string out;
  std::string clean;
  std::size_t patch = 0;
  std::size_t stride = 1;
  int threads = 1;
};

int run_denoise_image(const DenoiseImageOpts& o) {
  const auto noisy = cbdn::imagelab::read_pgm(o.in);
  const Codebook cb = cbdn::codec::load_codebook(o.codebook);
  const auto denoised =
      cbdn::imagelab::patch_denoise(noisy, cb, o.patch, o.stride, o.threads);
  cbdn::imagelab::write_pgm(denoised, o.out);
  if (!o.clean.empty()) {
    const auto clean = cbdn::imagelab::read_pgm(o.clean);
    nlohmann::json j{
        {"psnr_noisy", psnr_value(cbdn::imagelab::psnr(clean, noisy))},
        {"psnr_denoised", psnr_value(cbdn::imagelab::psnr(clean, denoised))}};
    std::cout << j.dump() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"codebook denoising toolkit"};
  app.require_subcommand(1);

  BuildOpts build;
  CLI::App* sub_build = app.add_subcommand(
      "codebook-build", "Build a codebook from samples or image patches");
  sub_build->add_option("--input", build.input,
                        "Samples CSV, or PGM when --patch is set")
      ->required();
  sub_build->add_option("--rate", build.rate, "Codebook rate in bits")
      ->required();
  sub_build->add_option("--out", build.out, "Output codebook file")
      ->required();
  sub_build->add_option("--method", build.method, "random or lloyd")
      ->check(CLI::IsMember({"random", "lloyd"}));
  sub_build->add_option("--seed", build.seed, "Master seed");
  sub_build->add_option("--iters", build.iters, "Lloyd iteration cap");
  sub_build->add_option("--tol", build.tol, "Lloyd relative tolerance");
  sub_build->add_option("--patch", build.patch,
                        "Train on k x k patches of a PGM input");
  sub_build->add_option("--stride", build.stride, "Patch stride");
  sub_build->add_option("--threads", build.threads, "Worker threads");

  VerifyOpts verify;
  CLI::App* sub_verify = app.add_subcommand(
      "verify-bounds", "Monte Carlo check of the reconstruction envelope");
  sub_verify->add_option("--codebook", verify.codebook, "Codebook file")
      ->required();
  sub_verify->add_option("--sigma", verify.sigma, "Noise standard deviation")
      ->required();
  sub_verify->add_option("--eta", verify.eta, "Rate split in (0,1)")
      ->required();
  sub_verify->add_option("--trials", verify.trials, "Trial count")
      ->required();
  sub_verify->add_option("--seed", verify.seed, "Master seed");
  sub_verify->add_option("--source", verify.source,
                         "Clean signal source: codewords or samples")
      ->check(CLI::IsMember({"codewords", "samples"}));
  sub_verify->add_option("--samples", verify.samples,
                         "Samples CSV for --source samples");
  sub_verify->add_option("--format", verify.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  sub_verify->add_flag("--per-trial", verify.per_trial,
                       "Include the per-trial array in JSON output");
  sub_verify->add_option("--threads", verify.threads, "Worker threads");

  PeOpts pe;
  CLI::App* sub_pe = app.add_subcommand(
      "pe", "Empirical decoding error probability and union bounds");
  sub_pe->add_option("--codebook", pe.codebook, "Codebook file")->required();
  sub_pe->add_option("--sigma", pe.sigma, "Noise standard deviation")
      ->required();
  sub_pe->add_option("--trials", pe.trials, "Trial count")->required();
  sub_pe->add_option("--seed", pe.seed, "Master seed");
  sub_pe->add_option("--dp", pe.dp,
                     "Squared offset norm (distortion-perception value)");
  sub_pe->add_option("--direction", pe.direction,
                     "CSV with one row: offset direction");
  sub_pe->add_option("--format", pe.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  sub_pe->add_option("--threads", pe.threads, "Worker threads");

  DpCurveOpts dpc;
  CLI::App* sub_dpc = app.add_subcommand(
      "dp-curve", "Tabulate the distortion-perception function");
  auto* opt_dstar =
      sub_dpc->add_option("--dstar", dpc.dstar, "Distortion floor");
  auto* opt_pstar =
      sub_dpc->add_option("--pstar", dpc.pstar, "Perception saturation point");
  sub_dpc
      ->add_option("--gaussian-ref", dpc.gaussian_ref,
                   "source_std noise_std: derive the curve parameters from "
                   "the scalar Gaussian reference")
      ->expected(2);
  sub_dpc->add_option("--points", dpc.points, "Grid size");
  auto* opt_pmax =
      sub_dpc->add_option("--pmax", dpc.pmax, "Grid upper end (default 2 p*)");

  DenoiseImageOpts den;
  CLI::App* sub_den = app.add_subcommand(
      "denoise-image", "Patch-wise nearest-codeword denoising of a PGM");
  sub_den->add_option("--in", den.in, "Noisy PGM")->required();
  sub_den->add_option("--codebook", den.codebook, "Codebook file")
      ->required();
  sub_den->add_option("--patch", den.patch, "Patch edge k")->required();
  sub_den->add_option("--out", den.out, "Output PGM")->required();
  sub_den->add_option("--stride", den.stride, "Patch stride");
  sub_den->add_option("--clean", den.clean,
                      "Clean PGM; prints PSNR JSON when given");
  sub_den->add_option("--threads", den.threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  dpc.have_dstar = opt_dstar->count() > 0;
  dpc.have_pstar = opt_pstar->count() > 0;
  dpc.have_pmax = opt_pmax->count() > 0;

  try {
    if (app.got_subcommand(sub_build)) return run_codebook_build(build);
    if (app.got_subcommand(sub_verify)) return run_verify_bounds(verify);
    if (app.got_subcommand(sub_pe)) return run_pe(pe);
    if (app.got_subcommand(sub_dpc)) return run_dp_curve(dpc);
    if (app.got_subcommand(sub_den)) return run_denoise_image(den);
  } catch (const cbdn::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const cbdn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
