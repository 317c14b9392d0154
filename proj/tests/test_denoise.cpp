#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "cbdn/denoise.hpp"
#include "cbdn/rng.hpp"

#include "testutil.hpp"

using cbdn::Codebook;
using cbdn::NoiseSpec;
using cbdn::Signal;
namespace denoise = cbdn::denoise;

namespace {

// Oracle NLLs recomputed from scratch with long double accumulation.
long double oracle_gaussian_nll(const Signal& c, const Signal& y,
                                double sigma) {
  long double quad = 0.0L;
  for (std::size_t i = 0; i < y.dim(); ++i) {
    const long double diff = static_cast<long double>(y[i]) - c[i];
    quad += diff * diff;
  }
  const long double n = static_cast<long double>(y.dim());
  return n * std::log(static_cast<long double>(sigma) *
                      std::sqrt(2.0L * std::numbers::pi_v<long double>)) +
         quad / (2.0L * sigma * sigma);
}

long double oracle_poisson_nll(const Signal& c, const Signal& y) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < y.dim(); ++i) {
    acc += static_cast<long double>(c[i]) -
           static_cast<long double>(y[i]) * std::log(static_cast<long double>(c[i])) +
           std::lgamma(static_cast<long double>(y[i]) + 1.0L);
  }
  return acc;
}

}  // namespace

TEST_CASE("gaussian nll constant term") {
  // Codeword equal to the observation leaves only the normalization:
  // n log(sigma sqrt(2 pi)) = log(2 pi) for n = 2, sigma = 1.
  const Signal y({0.3, -0.7});
  const double nll = denoise::neg_log_likelihood(y, y, NoiseSpec::gaussian(1.0));
  CHECK(nll == doctest::Approx(std::log(2.0 * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("gaussian nll matches oracle") {
  cbdn::rng::SplitMix64 g(5);
  std::vector<double> cb(6), yb(6);
  for (int rep = 0; rep < 100; ++rep) {
    cbdn::rng::fill_gaussian(g, cb);
    cbdn::rng::fill_gaussian(g, yb);
    const double sigma = 0.25 + 2.0 * g.uniform01();
    const Signal c(cb), y(yb);
    const double got = denoise::neg_log_likelihood(c, y, NoiseSpec::gaussian(sigma));
    const double want = static_cast<double>(oracle_gaussian_nll(c, y, sigma));
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("poisson nll values and domain") {
  const auto noise = NoiseSpec::poisson(10.0);
  // c = 1, y = 1: 1 - 1*log(1) + log(1!) = 1.
  CHECK(denoise::neg_log_likelihood(Signal({1.0}), Signal({1.0}), noise) ==
        doctest::Approx(1.0).epsilon(1e-15));

  cbdn::rng::SplitMix64 g(8);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> c(4), y(4);
    for (auto& v : c) v = 0.5 + 9.0 * g.uniform01();
    for (auto& v : y) v = static_cast<double>(g.bounded(20));
    const Signal cs(c), ys(y);
    CHECK(denoise::neg_log_likelihood(cs, ys, noise) ==
          doctest::Approx(static_cast<double>(oracle_poisson_nll(cs, ys)))
              .epsilon(1e-12));
  }

  CHECK_THROWS_AS(
      denoise::neg_log_likelihood(Signal({0.0}), Signal({1.0}), noise),
      cbdn::DomainError);
  CHECK_THROWS_AS(
      denoise::neg_log_likelihood(Signal({-2.0}), Signal({1.0}), noise),
      cbdn::DomainError);
  CHECK_THROWS_AS(
      denoise::neg_log_likelihood(Signal({1.0}), Signal({1.5}), noise),
      cbdn::DomainError);
  CHECK_THROWS_AS(
      denoise::neg_log_likelihood(Signal({1.0}), Signal({-1.0}), noise),
      cbdn::DomainError);
  CHECK_THROWS_AS(
      denoise::neg_log_likelihood(Signal({1.0, 2.0}), Signal({1.0}), noise),
      cbdn::DimensionError);
}

TEST_CASE("nn denoise basics") {
  const Codebook cb(1, {Signal({0.0, 0.0}), Signal({4.0, 4.0})});
  const auto dec = denoise::nn_denoise(cb, Signal({0.5, 0.5}));
  CHECK(dec.index == 1);
  CHECK(dec.codeword == cb.codeword(1));

  // Tie at the midpoint resolves to the smaller index.
  CHECK(denoise::nn_denoise(cb, Signal({2.0, 2.0})).index == 1);

  CHECK_THROWS_AS(denoise::nn_denoise(cb, Signal({1.0})),
                  cbdn::DimensionError);
}

TEST_CASE("ml denoise returns the observation's codeword when it is one") {
  const Codebook cb = testutil::gaussian_codebook(4, 5, 19);
  const auto noise = NoiseSpec::gaussian(0.7);
  for (std::size_t m = 1; m <= cb.size(); ++m) {
    const auto dec = denoise::ml_denoise(cb, cb.codeword(m), noise);
    CHECK(dec.index == m);
    CHECK(dec.codeword == cb.codeword(m));
  }
}

TEST_CASE("gaussian ml equals nn at every sigma") {
  const Codebook cb = testutil::gaussian_codebook(5, 6, 29);
  const auto queries = testutil::gaussian_signals(2000, 6, 30);
  for (const Signal& y : queries) {
    const std::size_t nn = denoise::nn_denoise(cb, y).index;
    for (double sigma : {0.1, 1.0, 10.0}) {
      CHECK(denoise::ml_denoise(cb, y, NoiseSpec::gaussian(sigma)).index == nn);
    }
  }
}

TEST_CASE("gaussian ml decision matches a full-likelihood oracle") {
  const Codebook cb = testutil::gaussian_codebook(4, 4, 37);
  const auto queries = testutil::gaussian_signals(300, 4, 38);
  const double sigma = 0.8;
  for (const Signal& y : queries) {
    std::size_t best = 0;
    long double best_nll = oracle_gaussian_nll(cb.codewords()[0], y, sigma);
    for (std::size_t m = 1; m < cb.size(); ++m) {
      const long double nll = oracle_gaussian_nll(cb.codewords()[m], y, sigma);
      if (nll < best_nll) {
        best_nll = nll;
        best = m;
      }
    }
    CHECK(denoise::ml_denoise(cb, y, NoiseSpec::gaussian(sigma)).index ==
          best + 1);
  }
}

TEST_CASE("poisson ml prefers the high-rate codeword for large counts") {
  const Codebook cb(1, {Signal({1.0, 1.0}), Signal({9.0, 9.0})});
  const auto noise = NoiseSpec::poisson(9.0);
  const auto dec = denoise::ml_denoise(cb, Signal({8.0, 10.0}), noise);
  CHECK(dec.index == 2);
  CHECK(dec.codeword == cb.codeword(2));

  // And the low-rate codeword for small counts.
  CHECK(denoise::ml_denoise(cb, Signal({1.0, 0.0}), noise).index == 1);
}

TEST_CASE("poisson ml matches oracle argmin on random counts") {
  cbdn::rng::SplitMix64 g(55);
  std::vector<Signal> cws;
  for (int m = 0; m < 8; ++m) {
    std::vector<double> c(3);
    for (auto& v : c) v = 0.5 + 15.0 * g.uniform01();
    cws.push_back(Signal(std::move(c)));
  }
  const Codebook cb(3, cws);
  const auto noise = NoiseSpec::poisson(16.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> y(3);
    for (auto& v : y) v = static_cast<double>(g.bounded(30));
    const Signal ys(y);
    std::size_t best = 0;
    long double best_nll = oracle_poisson_nll(cb.codewords()[0], ys);
    for (std::size_t m = 1; m < cb.size(); ++m) {
      const long double nll = oracle_poisson_nll(cb.codewords()[m], ys);
      if (nll < best_nll) {
        best_nll = nll;
        best = m;
      }
    }
    CHECK(denoise::ml_denoise(cb, ys, noise).index == best + 1);
  }
}

TEST_CASE("denoised output is a codebook member with minimal distance") {
  const Codebook cb = testutil::gaussian_codebook(4, 3, 41);
  const auto queries = testutil::gaussian_signals(200, 3, 42);
  for (const Signal& y : queries) {
    const auto dec = denoise::nn_denoise(cb, y);
    CHECK(dec.codeword == cb.codeword(dec.index));
    const double chosen = cbdn::l2_distance(dec.codeword, y);
    for (std::size_t m = 1; m <= cb.size(); ++m) {
      CHECK(chosen <= cbdn::l2_distance(cb.codeword(m), y));
    }
  }
}
