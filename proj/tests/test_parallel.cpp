#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

// The parallel kernels promise two things: they match the serial reference
// implementations, and their output does not depend on the thread count.
// Assignment, trial reports, error-rate estimates, Lloyd iterations, and
// patch denoising write disjoint slots and reduce sequentially, so for them
// equality is exact to the byte. The union bounds group the pair sums per
// row; serial and parallel totals are compared at a small tolerance, while
// the parallel results across thread counts are still bit-identical.

#include <cstddef>
#include <vector>

#include "cbdn/bounds.hpp"
#include "cbdn/codec.hpp"
#include "cbdn/core.hpp"
#include "cbdn/imagelab.hpp"
#include "cbdn/rng.hpp"
#include "cbdn/sim.hpp"

#include "testutil.hpp"

using cbdn::Codebook;
using cbdn::Signal;

namespace {
constexpr int kThreadCounts[] = {1, 2, 3, 4, 8};
}

TEST_CASE("batch assignment matches the serial reference exactly") {
  const Codebook cb = testutil::gaussian_codebook(6, 8, 1001);
  const std::vector<Signal> queries = testutil::gaussian_signals(2000, 8, 1002);
  std::vector<std::size_t> want(queries.size());
  cbdn::codec::assign_nearest_serial(cb, queries, want);
  for (int threads : kThreadCounts) {
    std::vector<std::size_t> got(queries.size());
    cbdn::codec::assign_nearest(cb, queries, got, threads);
    CHECK(got == want);
  }
}

TEST_CASE("union bounds match the serial reference") {
  const Codebook cb = testutil::gaussian_codebook(6, 8, 1011);
  cbdn::rng::SplitMix64 g(1012);
  std::vector<double> dd(8);
  cbdn::rng::fill_gaussian(g, dd);
  for (double& v : dd) v *= 0.1;
  const Signal d(dd);

  const double want = cbdn::bounds::union_bound_pe_serial(cb, d, 0.8);
  const double want_wc =
      cbdn::bounds::worst_case_union_bound_serial(cb, 0.3, 0.8);
  const double first = cbdn::bounds::union_bound_pe(cb, d, 0.8, 1);
  const double first_wc = cbdn::bounds::worst_case_union_bound(cb, 0.3, 0.8, 1);
  CHECK(first == doctest::Approx(want).epsilon(1e-12));
  CHECK(first_wc == doctest::Approx(want_wc).epsilon(1e-12));
  for (int threads : kThreadCounts) {
    // Bit-identical across thread counts, tolerance only against serial.
    CHECK(cbdn::bounds::union_bound_pe(cb, d, 0.8, threads) == first);
    CHECK(cbdn::bounds::worst_case_union_bound(cb, 0.3, 0.8, threads) ==
          first_wc);
  }
}

TEST_CASE("trial reports are byte identical for any thread count") {
  const Codebook cb = testutil::gaussian_codebook(5, 6, 1021);
  cbdn::sim::TrialConfig cfg;
  cfg.codebook = &cb;
  cfg.sigma = 0.6;
  cfg.eta = 0.5;
  cfg.n_trials = 4000;
  cfg.master_seed = 777;
  cfg.threads = 1;
  const std::string want =
      cbdn::sim::report_json(cbdn::sim::run_denoise_trials(cfg), true);
  for (int threads : kThreadCounts) {
    cfg.threads = threads;
    const std::string got =
        cbdn::sim::report_json(cbdn::sim::run_denoise_trials(cfg), true);
    CHECK(got == want);
  }
  // Repeat runs with the same configuration are also byte identical.
  cfg.threads = 4;
  CHECK(cbdn::sim::report_json(cbdn::sim::run_denoise_trials(cfg), true) ==
        want);
}

TEST_CASE("error rate estimates are identical for any thread count") {
  const Codebook cb = testutil::gaussian_codebook(4, 6, 1031);
  const Signal dir = testutil::gaussian_signals(1, 6, 1032)[0];
  const auto want =
      cbdn::sim::empirical_pe(cb, &dir, 0.2, 0.7, 20000, 99, 1);
  for (int threads : kThreadCounts) {
    const auto got =
        cbdn::sim::empirical_pe(cb, &dir, 0.2, 0.7, 20000, 99, threads);
    CHECK(got.estimate == want.estimate);
    CHECK(got.n_errors == want.n_errors);
    CHECK(got.wilson_low == want.wilson_low);
    CHECK(got.wilson_high == want.wilson_high);
  }
}

TEST_CASE("lloyd training is identical for any thread count") {
  const std::vector<Signal> training =
      testutil::gaussian_signals(600, 4, 1041);
  const auto want = cbdn::codec::lloyd_codebook(training, 4, 25, 1e-9, 3, 1);
  for (int threads : kThreadCounts) {
    const auto got =
        cbdn::codec::lloyd_codebook(training, 4, 25, 1e-9, 3, threads);
    CHECK(got.codebook.codewords() == want.codebook.codewords());
    CHECK(got.distortion_history == want.distortion_history);
  }
  const double dist1 =
      cbdn::codec::codebook_distortion(want.codebook, training, 1);
  for (int threads : kThreadCounts) {
    CHECK(cbdn::codec::codebook_distortion(want.codebook, training, threads) ==
          dist1);
  }
}

TEST_CASE("patch denoising is identical for any thread count") {
  cbdn::imagelab::GrayImage img;
  img.width = 40;
  img.height = 30;
  img.pixels.resize(img.width * img.height);
  cbdn::rng::SplitMix64 g(1051);
  for (double& p : img.pixels) p = g.uniform01();
  const Codebook cb = testutil::gaussian_codebook(5, 16, 1052);
  const auto want = cbdn::imagelab::patch_denoise(img, cb, 4, 2, 1);
  for (int threads : kThreadCounts) {
    const auto got = cbdn::imagelab::patch_denoise(img, cb, 4, 2, threads);
    CHECK(got.pixels == want.pixels);
  }
}
