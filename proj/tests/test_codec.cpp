#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "cbdn/codec.hpp"
#include "cbdn/core.hpp"
#include "cbdn/rng.hpp"

#include "testutil.hpp"

using cbdn::Codebook;
using cbdn::Signal;
namespace codec = cbdn::codec;

namespace {

// Brute-force oracle: recompute every distance with sqrt and pick the
// smallest index among minima.
std::size_t oracle_nearest(const Codebook& cb, const Signal& q) {
  std::size_t best = 0;
  double best_d = cbdn::l2_distance(cb.codewords()[0], q);
  for (std::size_t m = 1; m < cb.size(); ++m) {
    const double d = cbdn::l2_distance(cb.codewords()[m], q);
    if (d < best_d) {
      best_d = d;
      best = m;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("random codebook selects training samples without replacement") {
  const auto training = testutil::gaussian_signals(4, 3, 77);
  const Codebook cb = codec::build_random_codebook(training, 2, 5);
  // With exactly M samples the result must be a permutation of them.
  std::set<std::vector<double>> want, got;
  for (const Signal& s : training) want.insert(s.values());
  for (const Signal& s : cb.codewords()) got.insert(s.values());
  CHECK(want == got);
}

TEST_CASE("random codebook determinism and seed sensitivity") {
  const auto training = testutil::gaussian_signals(300, 4, 1);
  const Codebook a = codec::build_random_codebook(training, 3, 42);
  const Codebook b = codec::build_random_codebook(training, 3, 42);
  CHECK(a.codewords() == b.codewords());

  // Different seeds should essentially always pick different subsets.
  std::set<std::vector<std::vector<double>>> distinct;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Codebook cb = codec::build_random_codebook(training, 3, seed);
    std::vector<std::vector<double>> key;
    for (const Signal& s : cb.codewords()) key.push_back(s.values());
    distinct.insert(std::move(key));
  }
  CHECK(distinct.size() >= 90);
}

TEST_CASE("random codebook rejects undersized training sets") {
  const auto training = testutil::gaussian_signals(7, 3, 2);
  CHECK_THROWS_AS(codec::build_random_codebook(training, 3, 0),
                  cbdn::InsufficientDataError);
  CHECK_THROWS_AS(codec::build_random_codebook({}, 1, 0), cbdn::DomainError);
  CHECK_THROWS_AS(codec::build_random_codebook(training, 0, 0),
                  cbdn::DomainError);
  CHECK_THROWS_AS(codec::build_random_codebook(training, 31, 0),
                  cbdn::DomainError);
}

TEST_CASE("encode basics") {
  const Codebook cb(1, {Signal({0.0, 0.0}), Signal({4.0, 4.0})});
  CHECK(codec::encode(cb, Signal({1.0, 1.0})) == 1);
  CHECK(codec::encode(cb, Signal({3.0, 3.5})) == 2);
  // Exact codeword hits map to their own index.
  CHECK(codec::encode(cb, Signal({4.0, 4.0})) == 2);
  // Midpoint tie goes to the smaller index.
  CHECK(codec::encode(cb, Signal({2.0, 2.0})) == 1);
  CHECK_THROWS_AS(codec::encode(cb, Signal({1.0, 2.0, 3.0})),
                  cbdn::DimensionError);
}

TEST_CASE("encode is idempotent on codewords") {
  const Codebook cb = testutil::gaussian_codebook(5, 6, 31);
  for (std::size_t m = 1; m <= cb.size(); ++m) {
    CHECK(codec::encode(cb, cb.codeword(m)) == m);
  }
}

TEST_CASE("encode matches brute-force scan on random queries") {
  const Codebook cb = testutil::gaussian_codebook(6, 8, 13);
  const auto queries = testutil::gaussian_signals(100, 8, 14);
  for (const Signal& q : queries) {
    CHECK(codec::encode(cb, q) == oracle_nearest(cb, q) + 1);
  }
}

TEST_CASE("decode round-trips and validates indices") {
  const Codebook cb = testutil::gaussian_codebook(3, 4, 21);
  for (std::size_t m = 1; m <= cb.size(); ++m) {
    CHECK(codec::decode(cb, m) == cb.codeword(m));
  }
  CHECK_THROWS_AS(codec::decode(cb, 0), cbdn::IndexError);
  CHECK_THROWS_AS(codec::decode(cb, cb.size() + 1), cbdn::IndexError);
}

TEST_CASE("assign nearest agrees with its serial reference") {
  const Codebook cb = testutil::gaussian_codebook(5, 8, 3);
  const auto queries = testutil::gaussian_signals(500, 8, 4);
  std::vector<std::size_t> serial(queries.size());
  codec::assign_nearest_serial(cb, queries, serial);
  for (int threads : {1, 2, 4, 8}) {
    std::vector<std::size_t> par(queries.size());
    codec::assign_nearest(cb, queries, par, threads);
    CHECK(par == serial);
  }
  std::vector<std::size_t> wrong(queries.size() + 1);
  CHECK_THROWS_AS(codec::assign_nearest(cb, queries, wrong, 1),
                  cbdn::DimensionError);
  CHECK_THROWS_AS(codec::assign_nearest(cb, queries, serial, 0),
                  cbdn::DomainError);
}

TEST_CASE("codebook distortion") {
  // Samples identical to the codewords quantize with zero error.
  const auto cws = testutil::gaussian_signals(8, 4, 9);
  const Codebook cb(3, cws);
  CHECK(codec::codebook_distortion(cb, cws) == 0.0);

  // One-dimensional hand case: x = 0 between codewords at +-1.
  const Codebook cb1(1, {Signal({1.0}), Signal({-1.0})});
  const std::vector<Signal> zero{Signal({0.0})};
  CHECK(codec::codebook_distortion(cb1, zero) == 1.0);

  // Random case against a per-sample oracle.
  const Codebook cb2 = testutil::gaussian_codebook(4, 5, 10);
  const auto samples = testutil::gaussian_signals(64, 5, 11);
  double acc = 0.0;
  for (const Signal& x : samples) {
    const double d = cbdn::l2_distance(x, cb2.codewords()[oracle_nearest(cb2, x)]);
    acc += d * d;
  }
  const double expect = acc / static_cast<double>(samples.size());
  CHECK(codec::codebook_distortion(cb2, samples) ==
        doctest::Approx(expect).epsilon(1e-12));

  const auto wrong_dim = testutil::gaussian_signals(4, 3, 12);
  CHECK_THROWS_AS(codec::codebook_distortion(cb2, wrong_dim),
                  cbdn::DimensionError);
}

TEST_CASE("lloyd separates two obvious clusters") {
  // 100 points near -1 and 100 near +1 in two dimensions.
  cbdn::rng::SplitMix64 g(6);
  std::vector<Signal> training;
  for (int i = 0; i < 200; ++i) {
    const double center = i < 100 ? -1.0 : 1.0;
    training.push_back(Signal({center + 0.05 * cbdn::rng::gaussian(g),
                               center + 0.05 * cbdn::rng::gaussian(g)}));
  }
  const auto res = codec::lloyd_codebook(training, 1, 50, 1e-10, 3);
  std::vector<Signal> cws = res.codebook.codewords();
  std::sort(cws.begin(), cws.end(), [](const Signal& a, const Signal& b) {
    return a[0] < b[0];
  });
  CHECK(cws[0][0] == doctest::Approx(-1.0).epsilon(0.1));
  CHECK(cws[0][1] == doctest::Approx(-1.0).epsilon(0.1));
  CHECK(cws[1][0] == doctest::Approx(1.0).epsilon(0.1));
  CHECK(cws[1][1] == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("lloyd history is non-increasing and consistent") {
  const auto training = testutil::gaussian_signals(256, 4, 17);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto res = codec::lloyd_codebook(training, 3, 25, 1e-9, seed);
    REQUIRE(!res.distortion_history.empty());
    CHECK(res.distortion_history.size() <= 26);
    for (std::size_t i = 1; i < res.distortion_history.size(); ++i) {
      CHECK(res.distortion_history[i] <= res.distortion_history[i - 1]);
    }
    // The history starts at the random initialization's distortion and
    // ends at the returned codebook's distortion.
    const Codebook init = codec::build_random_codebook(training, 3, seed);
    CHECK(res.distortion_history.front() ==
          codec::codebook_distortion(init, training));
    CHECK(codec::codebook_distortion(res.codebook, training) ==
          res.distortion_history.back());
  }
}

TEST_CASE("lloyd with exactly M samples memorizes them") {
  const auto training = testutil::gaussian_signals(8, 3, 23);
  const auto res = codec::lloyd_codebook(training, 3, 10, 0.0, 1);
  CHECK(res.distortion_history.back() == 0.0);
}

TEST_CASE("lloyd parameter validation") {
  const auto training = testutil::gaussian_signals(16, 3, 2);
  CHECK_THROWS_AS(codec::lloyd_codebook(training, 2, 0, 1e-6, 1),
                  cbdn::DomainError);
  CHECK_THROWS_AS(codec::lloyd_codebook(training, 2, 10, -1.0, 1),
                  cbdn::DomainError);
  CHECK_THROWS_AS(codec::lloyd_codebook(training, 2, 10, 1e-6, 1, 0),
                  cbdn::DomainError);
  CHECK_THROWS_AS(codec::lloyd_codebook(training, 5, 10, 1e-6, 1),
                  cbdn::InsufficientDataError);
}

TEST_CASE("codebook file round-trip is bit-exact") {
  testutil::TempDir tmp;
  const Codebook cb = testutil::gaussian_codebook(4, 7, 99);
  const auto path = tmp.file("cb.cdbk");
  codec::save_codebook(cb, path);
  const Codebook back = codec::load_codebook(path);
  CHECK(back.rate_bits() == cb.rate_bits());
  CHECK(back.dim() == cb.dim());
  CHECK(back.codewords() == cb.codewords());

  // Encode decisions survive the round trip exactly.
  const auto queries = testutil::gaussian_signals(200, 7, 100);
  for (const Signal& q : queries) {
    CHECK(codec::encode(back, q) == codec::encode(cb, q));
  }

  // Saving again produces identical bytes.
  const auto path2 = tmp.file("cb2.cdbk");
  codec::save_codebook(back, path2);
  CHECK(testutil::read_file(path) == testutil::read_file(path2));
}

TEST_CASE("codebook loader rejects malformed files") {
  testutil::TempDir tmp;
  const Codebook cb = testutil::gaussian_codebook(2, 3, 7);
  const auto path = tmp.file("cb.cdbk");
  codec::save_codebook(cb, path);
  const std::string good = testutil::read_file(path);

  const auto check_rejects = [&](const std::string& data) {
    const auto bad = tmp.file("bad.cdbk");
    testutil::write_file(bad, data);
    CHECK_THROWS_AS(codec::load_codebook(bad), cbdn::FormatError);
  };

  SUBCASE("missing file") {
    CHECK_THROWS_AS(codec::load_codebook(tmp.file("absent.cdbk")),
                    cbdn::FormatError);
  }
  SUBCASE("bad magic") {
    std::string data = good;
    data[0] = 'X';
    check_rejects(data);
  }
  SUBCASE("unsupported version") {
    std::string data = good;
    data[4] = 2;
    check_rejects(data);
  }
  SUBCASE("rate_bits zero") {
    std::string data = good;
    data[12] = 0;
    check_rejects(data);
  }
  SUBCASE("truncated header") { check_rejects(good.substr(0, 10)); }
  SUBCASE("truncated payload drops below the declared codeword count") {
    // Remove one codeword's worth of bytes: the file then holds 3 of the
    // 4 declared codewords.
    check_rejects(good.substr(0, good.size() - 3 * 8));
  }
  SUBCASE("trailing data") { check_rejects(good + "x"); }
  SUBCASE("non-finite codeword value") {
    std::string data = good;
    // Overwrite the first codeword value with a quiet NaN (little-endian).
    const unsigned char nan_bytes[8] = {0, 0, 0, 0, 0, 0, 0xf8, 0x7f};
    for (int i = 0; i < 8; ++i) data[16 + i] = static_cast<char>(nan_bytes[i]);
    check_rejects(data);
  }
}
