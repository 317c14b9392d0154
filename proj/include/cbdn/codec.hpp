#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cbdn/core.hpp"

namespace cbdn::codec {

/// Exhaustive nearest-codeword scan over squared Euclidean distances,
/// 0-based result. Ties resolve to the smallest index (strict < update).
/// Every encode / nearest-neighbour decision in the library funnels
/// through this kernel so decision rules agree bit for bit.
std::size_t nearest_codeword0(const Codebook& cb,
                              std::span<const double> query) noexcept;

/// Batch nearest-codeword assignment, OpenMP-parallel over queries.
/// out[i] receives the 0-based index for queries[i]; slots are disjoint,
/// so any thread count yields identical output.
void assign_nearest(const Codebook& cb, const std::vector<Signal>& queries,
                    std::span<std::size_t> out, int threads);

/// Plain-loop reference for assign_nearest, kept for tests and benchmarks.
void assign_nearest_serial(const Codebook& cb,
                           const std::vector<Signal>& queries,
                           std::span<std::size_t> out);

/// Codebook of 2^rate_bits training samples drawn without replacement
/// (partial Fisher-Yates on the index array, seeded). Order of selection
/// is preserved.
Codebook build_random_codebook(const std::vector<Signal>& training,
                               unsigned rate_bits, std::uint64_t seed);

struct LloydResult {
  Codebook codebook;
  /// Mean squared distortion measured at each assignment pass, first entry
  /// is the distortion of the random initialization. Non-increasing.
  std::vector<double> distortion_history;
};

/// Generalized Lloyd iteration (k-means) on the training set. Starts from
/// build_random_codebook(training, rate_bits, seed), alternates
/// nearest-assignment and centroid update, reseeds empty cells with the
/// sample farthest from its centroid, and stops after max_iters passes or
/// when the relative distortion drop falls below rel_tol. The returned
/// codebook is the one whose distortion equals distortion_history.back().
LloydResult lloyd_codebook(const std::vector<Signal>& training,
                           unsigned rate_bits, std::size_t max_iters,
                           double rel_tol, std::uint64_t seed,
                           int threads = 1);

/// 1-based index of the nearest codeword.
std::size_t encode(const Codebook& cb, const Signal& x);

/// Codeword for a 1-based index; throws IndexError outside 1..M.
Signal decode(const Codebook& cb, std::size_t m);

/// Mean squared quantization error of `samples` under nearest-codeword
/// assignment: (1/N) sum_i ||x_i - c_{encode(x_i)}||^2.
double codebook_distortion(const Codebook& cb,
                           const std::vector<Signal>& samples,
                           int threads = 1);

/// Binary codebook file: magic "CDBK", format version, dimension and rate
/// as unsigned 32-bit little-endian, then all codewords as IEEE-754
/// doubles, codeword-major, little-endian. Loading validates magic,
/// version, header sanity, exact payload size, and finite values;
/// round-trips are bit-exact.
void save_codebook(const Codebook& cb, const std::filesystem::path& path);
Codebook load_codebook(const std::filesystem::path& path);

}  // namespace cbdn::codec
