#pragma once

#include <cstddef>
#include <filesystem>
#include <utility>
#include <vector>

#include "cbdn/core.hpp"

namespace cbdn::imagelab {

/// Grayscale image with pixels in [0,1], row-major.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;

  double at(std::size_t row, std::size_t col) const noexcept {
    return pixels[row * width + col];
  }
  double& at(std::size_t row, std::size_t col) noexcept {
    return pixels[row * width + col];
  }
};

/// Binary PGM (P5, maxval 255) I/O. Reads accept '#' comments in the
/// header and map sample v to v/255; anything else (P2, other maxval,
/// short or oversize payload) is a FormatError. Writes quantize with
/// round-half-up to 255 levels; write-read-write round-trips are
/// byte-identical.
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Patch grid offsets along one extent: 0, stride, 2*stride, ... while
/// k fits; if the final offset misses the end, extent - k is appended so
/// the last patch is flush with the border.
std::vector<std::size_t> patch_offsets(std::size_t extent, std::size_t k,
                                       std::size_t stride);

/// Top-left (row, col) positions of all k x k patches, row-major over the
/// offset grids of both axes.
std::vector<std::pair<std::size_t, std::size_t>> patch_positions(
    const GrayImage& img, std::size_t k, std::size_t stride);

/// Flattened k x k patches (row-major within each patch) at
/// patch_positions(img, k, stride).
std::vector<Signal> extract_patches(const GrayImage& img, std::size_t k,
                                    std::size_t stride);

/// Inverse of extraction: every pixel becomes the arithmetic mean of all
/// patch values covering it (extended-precision accumulation, deterministic
/// patch order), then clamps to [0,1]. A pixel covered by no patch is a
/// CoverageError. Feeding back unmodified extracted patches reproduces the
/// image exactly.
GrayImage reassemble_average(
    const std::vector<Signal>& patches,
    const std::vector<std::pair<std::size_t, std::size_t>>& positions,
    std::size_t width, std::size_t height, std::size_t k);

/// Patch-wise nearest-codeword denoising: extract k x k patches, replace
/// each by its nearest codeword (codebook dimension must equal k*k),
/// reassemble by averaging. Patch projection is OpenMP-parallel with
/// deterministic output for any thread count.
GrayImage patch_denoise(const GrayImage& noisy, const Codebook& cb,
                        std::size_t k, std::size_t stride, int threads = 1);

/// Peak signal-to-noise ratio in dB over [0,1] pixels:
/// 10 log10(1 / MSE); +infinity for identical images.
double psnr(const GrayImage& a, const GrayImage& b);

}  // namespace cbdn::imagelab
