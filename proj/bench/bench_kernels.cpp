// Serial vs OpenMP comparison for the hot kernels: batch nearest-codeword
// assignment, the O(M^2) union bound, the Monte Carlo trial loop, and
// patch-wise image denoising.
//
// Run: ./bench/cbdn_bench [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "cbdn/bounds.hpp"
#include "cbdn/codec.hpp"
#include "cbdn/core.hpp"
#include "cbdn/imagelab.hpp"
#include "cbdn/rng.hpp"
#include "cbdn/sim.hpp"

namespace {

using cbdn::Codebook;
using cbdn::Signal;

std::vector<Signal> random_signals(std::size_t count, std::size_t dim,
                                   std::uint64_t seed) {
  cbdn::rng::SplitMix64 g(seed);
  std::vector<Signal> out;
  out.reserve(count);
  std::vector<double> buf(dim);
  for (std::size_t i = 0; i < count; ++i) {
    cbdn::rng::fill_gaussian(g, buf);
    out.push_back(Signal(buf));
  }
  return out;
}

Codebook random_codebook(unsigned rate_bits, std::size_t dim,
                         std::uint64_t seed) {
  return Codebook(rate_bits,
                  random_signals(std::size_t{1} << rate_bits, dim, seed));
}

const std::size_t kQueryCount = 4096;
const std::size_t kDim = 16;

void bm_assign_nearest_serial(benchmark::State& state) {
  const Codebook cb = random_codebook(8, kDim, 1);
  const auto queries = random_signals(kQueryCount, kDim, 2);
  std::vector<std::size_t> out(queries.size());
  for (auto _ : state) {
    cbdn::codec::assign_nearest_serial(cb, queries, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(queries.size()));
}
BENCHMARK(bm_assign_nearest_serial);

void bm_assign_nearest_omp(benchmark::State& state) {
  const Codebook cb = random_codebook(8, kDim, 1);
  const auto queries = random_signals(kQueryCount, kDim, 2);
  std::vector<std::size_t> out(queries.size());
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    cbdn::codec::assign_nearest(cb, queries, out, threads);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(queries.size()));
}
BENCHMARK(bm_assign_nearest_omp)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

void bm_union_bound_serial(benchmark::State& state) {
  const Codebook cb = random_codebook(8, kDim, 3);
  const Signal d = Signal::zeros(kDim);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cbdn::bounds::union_bound_pe_serial(cb, d, 1.0));
  }
}
BENCHMARK(bm_union_bound_serial);

void bm_union_bound_omp(benchmark::State& state) {
  const Codebook cb = random_codebook(8, kDim, 3);
  const Signal d = Signal::zeros(kDim);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cbdn::bounds::union_bound_pe(cb, d, 1.0, threads));
  }
}
BENCHMARK(bm_union_bound_omp)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

void bm_denoise_trials(benchmark::State& state) {
  const Codebook cb = random_codebook(8, kDim, 4);
  cbdn::sim::TrialConfig cfg;
  cfg.codebook = &cb;
  cfg.sigma = 1.0;
  cfg.eta = 0.5;
  cfg.n_trials = 20000;
  cfg.master_seed = 7;
  cfg.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto report = cbdn::sim::run_denoise_trials(cfg);
    benchmark::DoNotOptimize(report.aggregates.mean_err_sq);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(cfg.n_trials));
}
BENCHMARK(bm_denoise_trials)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

void bm_patch_denoise(benchmark::State& state) {
  // 128x128 noisy image, 4x4 patches, stride 1.
  const std::size_t w = 128, h = 128;
  cbdn::rng::SplitMix64 g(11);
  cbdn::imagelab::GrayImage img;
  img.width = w;
  img.height = h;
  img.pixels.resize(w * h);
  for (double& p : img.pixels) p = g.uniform01();
  const Codebook cb = random_codebook(8, 16, 12);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto out = cbdn::imagelab::patch_denoise(img, cb, 4, 1, threads);
    benchmark::DoNotOptimize(out.pixels.data());
  }
}
BENCHMARK(bm_patch_denoise)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
