#include "cbdn/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "cbdn/rng.hpp"

namespace cbdn::codec {

namespace {

void check_threads(int threads) {
  if (threads < 1) throw DomainError("threads must be >= 1");
}

// Consistent-dimension check for a sample set; returns the common dim.
std::size_t check_samples(const std::vector<Signal>& xs, const char* what) {
  if (xs.empty()) throw DomainError(std::string(what) + ": empty sample set");
  const std::size_t dim = xs.front().dim();
  for (const Signal& x : xs) {
    if (x.dim() != dim) {
      throw DimensionError(std::string(what) + ": samples have mixed dimensions");
    }
  }
  return dim;
}

// Index and squared distance of the nearest codeword, strict < update so
// ties keep the smallest index.
inline void nearest_with_dist(const Codebook& cb, std::span<const double> q,
                              std::size_t& best, double& best_d2) noexcept {
  const auto& cws = cb.codewords();
  best = 0;
  best_d2 = squared_distance(cws[0].span(), q);
  for (std::size_t m = 1; m < cws.size(); ++m) {
    const double d2 = squared_distance(cws[m].span(), q);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = m;
    }
  }
}

// One assignment pass: nearest index and squared distance per sample,
// parallel over samples with disjoint slot writes.
void assign_pass(const Codebook& cb, const std::vector<Signal>& xs,
                 std::vector<std::size_t>& assigns, std::vector<double>& sqd,
                 int threads) {
  const auto n = static_cast<std::int64_t>(xs.size());
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    nearest_with_dist(cb, xs[static_cast<std::size_t>(i)].span(),
                      assigns[static_cast<std::size_t>(i)],
                      sqd[static_cast<std::size_t>(i)]);
  }
}

// Mean of sqd, fixed left-to-right.
double mean_sqd(const std::vector<double>& sqd) {
  double acc = 0.0;
  for (double v : sqd) acc += v;
  return acc / static_cast<double>(sqd.size());
}

void put_u32le(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
}

void put_u64le(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
}

std::uint32_t get_u32le(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t get_u64le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

constexpr char kMagic[4] = {'C', 'D', 'B', 'K'};
constexpr std::uint32_t kFormatVersion = 1;
// Header sanity cap; keeps the payload size computation far from overflow.
constexpr std::uint32_t kMaxFileDim = 1u << 24;

}  // namespace

std::size_t nearest_codeword0(const Codebook& cb,
                              std::span<const double> query) noexcept {
  std::size_t best;
  double best_d2;
  nearest_with_dist(cb, query, best, best_d2);
  return best;
}

void assign_nearest(const Codebook& cb, const std::vector<Signal>& queries,
                    std::span<std::size_t> out, int threads) {
  check_threads(threads);
  if (out.size() != queries.size()) {
    throw DimensionError("assign_nearest: output size != query count");
  }
  const auto n = static_cast<std::int64_t>(queries.size());
  for (const Signal& q : queries) {
    if (q.dim() != cb.dim()) {
      throw DimensionError("assign_nearest: query dimension mismatch");
    }
  }
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        nearest_codeword0(cb, queries[static_cast<std::size_t>(i)].span());
  }
}

void assign_nearest_serial(const Codebook& cb,
                           const std::vector<Signal>& queries,
                           std::span<std::size_t> out) {
  if (out.size() != queries.size()) {
    throw DimensionError("assign_nearest_serial: output size != query count");
  }
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (queries[i].dim() != cb.dim()) {
      throw DimensionError("assign_nearest_serial: query dimension mismatch");
    }
    out[i] = nearest_codeword0(cb, queries[i].span());
  }
}

Codebook build_random_codebook(const std::vector<Signal>& training,
                               unsigned rate_bits, std::uint64_t seed) {
  if (rate_bits < 1 || rate_bits > kMaxRateBits) {
    throw DomainError("build_random_codebook: rate_bits must be in 1.." +
                      std::to_string(kMaxRateBits));
  }
  check_samples(training, "build_random_codebook");
  const std::size_t m_count = std::size_t{1} << rate_bits;
  if (training.size() < m_count) {
    throw InsufficientDataError(
        "build_random_codebook: need at least " + std::to_string(m_count) +
        " training samples, got " + std::to_string(training.size()));
  }
  // Partial Fisher-Yates: the first m_count entries of a seeded shuffle,
  // i.e. a uniform draw without replacement.
  std::vector<std::size_t> idx(training.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng::SplitMix64 g(seed);
  for (std::size_t i = 0; i < m_count; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(g.bounded(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<Signal> codewords;
  codewords.reserve(m_count);
  for (std::size_t i = 0; i < m_count; ++i) codewords.push_back(training[idx[i]]);
  return Codebook(rate_bits, std::move(codewords));
}

LloydResult lloyd_codebook(const std::vector<Signal>& training,
                           unsigned rate_bits, std::size_t max_iters,
                           double rel_tol, std::uint64_t seed, int threads) {
  check_threads(threads);
  if (max_iters < 1) throw DomainError("lloyd_codebook: max_iters must be >= 1");
  if (!(rel_tol >= 0.0) || !std::isfinite(rel_tol)) {
    throw DomainError("lloyd_codebook: rel_tol must be >= 0 and finite");
  }
  const std::size_t dim = check_samples(training, "lloyd_codebook");
  Codebook current = build_random_codebook(training, rate_bits, seed);
  const std::size_t m_count = current.size();
  const std::size_t n = training.size();

  std::vector<std::size_t> assigns(n);
  std::vector<double> sqd(n);
  std::vector<double> history;
  history.reserve(max_iters + 1);

  assign_pass(current, training, assigns, sqd, threads);
  history.push_back(mean_sqd(sqd));

  for (std::size_t iter = 1; iter <= max_iters; ++iter) {
    if (history.back() == 0.0) break;

    // Centroid update: per-cluster means, accumulated in sample order.
    std::vector<std::vector<double>> sums(m_count, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(m_count, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t m = assigns[i];
      ++counts[m];
      const Signal& x = training[i];
      for (std::size_t j = 0; j < dim; ++j) sums[m][j] += x[j];
    }
    // Empty cells restart at the samples currently worst represented;
    // worst first, ties to the smaller sample index.
    std::vector<std::size_t> by_dist;
    std::size_t next_reseed = 0;
    for (std::size_t m = 0; m < m_count; ++m) {
      if (counts[m] > 0) continue;
      if (by_dist.empty()) {
        by_dist.resize(n);
        std::iota(by_dist.begin(), by_dist.end(), std::size_t{0});
        std::stable_sort(by_dist.begin(), by_dist.end(),
                         [&](std::size_t a, std::size_t b) {
                           return sqd[a] > sqd[b];
                         });
      }
      const Signal& x = training[by_dist[next_reseed++]];
      sums[m].assign(x.values().begin(), x.values().end());
      counts[m] = 1;
    }
    std::vector<Signal> centroids;
    centroids.reserve(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
      std::vector<double> c(dim);
      const double inv = 1.0 / static_cast<double>(counts[m]);
      for (std::size_t j = 0; j < dim; ++j) c[j] = sums[m][j] * inv;
      centroids.push_back(Signal(std::move(c)));
    }
    Codebook updated(rate_bits, std::move(centroids));

    assign_pass(updated, training, assigns, sqd, threads);
    const double cur = mean_sqd(sqd);
    const double prev = history.back();
    if (cur > prev) break;  // numerical plateau; keep the previous state
    history.push_back(cur);
    current = std::move(updated);
    if (prev - cur <= rel_tol * prev) break;
  }
  return LloydResult{std::move(current), std::move(history)};
}

std::size_t encode(const Codebook& cb, const Signal& x) {
  if (x.dim() != cb.dim()) {
    throw DimensionError("encode: signal dimension " + std::to_string(x.dim()) +
                         " != codebook dimension " + std::to_string(cb.dim()));
  }
  return nearest_codeword0(cb, x.span()) + 1;
}

Signal decode(const Codebook& cb, std::size_t m) { return cb.codeword(m); }

double codebook_distortion(const Codebook& cb,
                           const std::vector<Signal>& samples, int threads) {
  check_threads(threads);
  const std::size_t dim = check_samples(samples, "codebook_distortion");
  if (dim != cb.dim()) {
    throw DimensionError("codebook_distortion: sample dimension mismatch");
  }
  std::vector<std::size_t> assigns(samples.size());
  std::vector<double> sqd(samples.size());
  assign_pass(cb, samples, assigns, sqd, threads);
  return mean_sqd(sqd);
}

void save_codebook(const Codebook& cb, const std::filesystem::path& path) {
  std::string buf;
  buf.reserve(16 + cb.size() * cb.dim() * 8);
  buf.append(kMagic, 4);
  put_u32le(buf, kFormatVersion);
  put_u32le(buf, static_cast<std::uint32_t>(cb.dim()));
  put_u32le(buf, cb.rate_bits());
  for (const Signal& c : cb.codewords()) {
    for (double v : c.values()) put_u64le(buf, std::bit_cast<std::uint64_t>(v));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError("save_codebook: cannot open " + path.string());
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) {
    throw FormatError("save_codebook: write failed: " + path.string());
  }
}

Codebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("load_codebook: cannot open " + path.string());
  }
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) {
    throw FormatError("load_codebook: read failed: " + path.string());
  }
  if (data.size() < 16) {
    throw FormatError("load_codebook: truncated header");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());
  if (std::memcmp(data.data(), kMagic, 4) != 0) {
    throw FormatError("load_codebook: bad magic (not a codebook file)");
  }
  const std::uint32_t version = get_u32le(p + 4);
  if (version != kFormatVersion) {
    throw FormatError("load_codebook: unsupported format version " +
                      std::to_string(version));
  }
  const std::uint32_t dim = get_u32le(p + 8);
  const std::uint32_t rate_bits = get_u32le(p + 12);
  if (dim < 1 || dim > kMaxFileDim) {
    throw FormatError("load_codebook: implausible dimension " +
                      std::to_string(dim));
  }
  if (rate_bits < 1 || rate_bits > kMaxRateBits) {
    throw FormatError("load_codebook: rate_bits out of range");
  }
  const std::size_t m_count = std::size_t{1} << rate_bits;
  const std::size_t need = 16 + m_count * static_cast<std::size_t>(dim) * 8;
  if (data.size() < need) {
    throw FormatError("load_codebook: truncated payload (file holds fewer than " +
                      std::to_string(m_count) + " codewords)");
  }
  if (data.size() > need) {
    throw FormatError("load_codebook: trailing data after payload");
  }
  std::vector<Signal> codewords;
  codewords.reserve(m_count);
  const unsigned char* cursor = p + 16;
  for (std::size_t m = 0; m < m_count; ++m) {
    std::vector<double> values(dim);
    for (std::uint32_t j = 0; j < dim; ++j) {
      values[j] = std::bit_cast<double>(get_u64le(cursor));
      cursor += 8;
      if (!std::isfinite(values[j])) {
        throw FormatError("load_codebook: non-finite codeword value");
      }
    }
    codewords.push_back(Signal(std::move(values)));
  }
  return Codebook(static_cast<unsigned>(rate_bits), std::move(codewords));
}

}  // namespace cbdn::codec
