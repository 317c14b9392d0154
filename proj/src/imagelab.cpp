#include "cbdn/imagelab.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>

#include "cbdn/codec.hpp"

namespace cbdn::imagelab {

namespace {

void check_image(const GrayImage& img, const char* what) {
  if (img.width < 1 || img.height < 1) {
    throw DimensionError(std::string(what) + ": empty image");
  }
  if (img.pixels.size() != img.width * img.height) {
    throw DimensionError(std::string(what) +
                         ": pixel buffer does not match width*height");
  }
}

void check_finite_pixels(const GrayImage& img, const char* what) {
  for (double p : img.pixels) {
    if (!std::isfinite(p)) {
      throw DomainError(std::string(what) + ": non-finite pixel");
    }
  }
}

// Header token reader: skips whitespace and '#' comments.
class PgmCursor {
 public:
  PgmCursor(const std::string& data, const std::string& name)
      : data_(data), name_(name) {}

  std::string token() {
    skip_separators();
    if (pos_ >= data_.size()) {
      throw FormatError("read_pgm: truncated header in " + name_);
    }
    std::size_t start = pos_;
    while (pos_ < data_.size() && !is_space(data_[pos_]) &&
           data_[pos_] != '#') {
      ++pos_;
    }
    return data_.substr(start, pos_ - start);
  }

  // The single whitespace byte that separates maxval from the payload.
  void expect_one_separator() {
    if (pos_ >= data_.size() || !is_space(data_[pos_])) {
      throw FormatError("read_pgm: missing payload separator in " + name_);
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  }

  void skip_separators() {
    while (pos_ < data_.size()) {
      if (is_space(data_[pos_])) {
        ++pos_;
      } else if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& data_;
  std::string name_;
  std::size_t pos_ = 0;
};

std::size_t parse_header_int(const std::string& tok, const std::string& name) {
  if (tok.empty() || tok.size() > 9) {
    throw FormatError("read_pgm: bad header number in " + name);
  }
  std::size_t v = 0;
  for (char c : tok) {
    if (c < '0' || c > '9') {
      throw FormatError("read_pgm: bad header number in " + name);
    }
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("read_pgm: cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  PgmCursor cur(data, path.string());
  if (cur.token() != "P5") {
    throw FormatError("read_pgm: not a binary PGM (P5): " + path.string());
  }
  const std::size_t width = parse_header_int(cur.token(), path.string());
  const std::size_t height = parse_header_int(cur.token(), path.string());
  const std::string maxval = cur.token();
  if (maxval != "255") {
    throw FormatError("read_pgm: unsupported maxval " + maxval + " in " +
                      path.string());
  }
  if (width < 1 || height < 1) {
    throw FormatError("read_pgm: empty image in " + path.string());
  }
  cur.expect_one_separator();
  const std::size_t need = width * height;
  if (data.size() - cur.pos() < need) {
    throw FormatError("read_pgm: truncated payload in " + path.string());
  }
  if (data.size() - cur.pos() > need) {
    throw FormatError("read_pgm: trailing data in " + path.string());
  }
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(need);
  const auto* bytes =
      reinterpret_cast<const unsigned char*>(data.data() + cur.pos());
  for (std::size_t i = 0; i < need; ++i) {
    img.pixels[i] = static_cast<double>(bytes[i]) / 255.0;
  }
  return img;
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
  check_image(img, "write_pgm");
  check_finite_pixels(img, "write_pgm");
  std::string buf = "P5\n" + std::to_string(img.width) + " " +
                    std::to_string(img.height) + "\n255\n";
  buf.reserve(buf.size() + img.pixels.size());
  for (double p : img.pixels) {
    // Round half up on the 255 scale, clamped.
    double v = std::floor(p * 255.0 + 0.5);
    if (v < 0.0) v = 0.0;
    if (v > 255.0) v = 255.0;
    buf.push_back(static_cast<char>(static_cast<unsigned char>(v)));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("write_pgm: cannot open " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw FormatError("write_pgm: write failed: " + path.string());
}

std::vector<std::size_t> patch_offsets(std::size_t extent, std::size_t k,
                                       std::size_t stride) {
  if (k < 1) throw DomainError("patch_offsets: k must be >= 1");
  if (stride < 1) throw DomainError("patch_offsets: stride must be >= 1");
  if (k > extent) {
    throw DomainError("patch_offsets: patch size " + std::to_string(k) +
                      " exceeds extent " + std::to_string(extent));
  }
  std::vector<std::size_t> offs;
  for (std::size_t r = 0; r + k <= extent; r += stride) offs.push_back(r);
  // Keep the far border covered when the stride does not land on it.
  if (offs.back() + k < extent) offs.push_back(extent - k);
  return offs;
}

std::vector<std::pair<std::size_t, std::size_t>> patch_positions(
    const GrayImage& img, std::size_t k, std::size_t stride) {
  check_image(img, "patch_positions");
  const auto rows = patch_offsets(img.height, k, stride);
  const auto cols = patch_offsets(img.width, k, stride);
  std::vector<std::pair<std::size_t, std::size_t>> pos;
  pos.reserve(rows.size() * cols.size());
  for (std::size_t r : rows) {
    for (std::size_t c : cols) pos.emplace_back(r, c);
  }
  return pos;
}

std::vector<Signal> extract_patches(const GrayImage& img, std::size_t k,
                                    std::size_t stride) {
  const auto positions = patch_positions(img, k, stride);
  check_finite_pixels(img, "extract_patches");
  std::vector<Signal> patches;
  patches.reserve(positions.size());
  std::vector<double> buf(k * k);
  for (const auto& [r, c] : positions) {
    for (std::size_t pr = 0; pr < k; ++pr) {
      for (std::size_t pc = 0; pc < k; ++pc) {
        buf[pr * k + pc] = img.at(r + pr, c + pc);
      }
    }
    patches.push_back(Signal(buf));
  }
  return patches;
}

GrayImage reassemble_average(
    const std::vector<Signal>& patches,
    const std::vector<std::pair<std::size_t, std::size_t>>& positions,
    std::size_t width, std::size_t height, std::size_t k) {
  if (width < 1 || height < 1) {
    throw DimensionError("reassemble_average: empty target image");
  }
  if (k < 1) throw DomainError("reassemble_average: k must be >= 1");
  if (patches.size() != positions.size()) {
    throw DimensionError(
        "reassemble_average: patch count does not match position count");
  }
  for (const Signal& p : patches) {
    if (p.dim() != k * k) {
      throw DimensionError("reassemble_average: patch dimension != k*k");
    }
  }
  for (const auto& [r, c] : positions) {
    if (r + k > height || c + k > width) {
      throw DomainError("reassemble_average: patch exceeds image bounds");
    }
  }
  // Per-pixel extended-precision accumulation in patch order. Sums of up
  // to 2^11 double contributions stay exact in the 64-bit significand, so
  // a pixel whose contributions are all the same value averages to exactly
  // that value; that is what makes reassemble(extract) the identity.
  // (Coverage counts are at most k^2, so this holds for any k <= 45.)
  const std::size_t n = width * height;
  std::vector<long double> sum(n, 0.0L);
  std::vector<std::uint32_t> count(n, 0);
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const auto [r, c] = positions[i];
    const Signal& p = patches[i];
    for (std::size_t pr = 0; pr < k; ++pr) {
      for (std::size_t pc = 0; pc < k; ++pc) {
        const std::size_t idx = (r + pr) * width + (c + pc);
        sum[idx] += p[pr * k + pc];
        ++count[idx];
      }
    }
  }
  GrayImage out;
  out.width = width;
  out.height = height;
  out.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i] == 0) {
      throw CoverageError(
          "reassemble_average: pixel " + std::to_string(i) +
          " is covered by no patch (stride leaves gaps)");
    }
    double mean = static_cast<double>(sum[i] /
                                      static_cast<long double>(count[i]));
    if (mean < 0.0) mean = 0.0;
    if (mean > 1.0) mean = 1.0;
    out.pixels[i] = mean;
  }
  return out;
}

GrayImage patch_denoise(const GrayImage& noisy, const Codebook& cb,
                        std::size_t k, std::size_t stride, int threads) {
  check_image(noisy, "patch_denoise");
  if (cb.dim() != k * k) {
    throw DimensionError("patch_denoise: codebook dimension " +
                         std::to_string(cb.dim()) + " != k*k = " +
                         std::to_string(k * k));
  }
  const auto positions = patch_positions(noisy, k, stride);
  const auto patches = extract_patches(noisy, k, stride);
  std::vector<std::size_t> nearest(patches.size());
  codec::assign_nearest(cb, patches, nearest, threads);
  std::vector<Signal> projected;
  projected.reserve(patches.size());
  for (std::size_t i = 0; i < patches.size(); ++i) {
    projected.push_back(cb.codewords()[nearest[i]]);
  }
  return reassemble_average(projected, positions, noisy.width, noisy.height,
                            k);
}

double psnr(const GrayImage& a, const GrayImage& b) {
  check_image(a, "psnr");
  check_image(b, "psnr");
  if (a.width != b.width || a.height != b.height) {
    throw DimensionError("psnr: image dimensions differ");
  }
  check_finite_pixels(a, "psnr");
  check_finite_pixels(b, "psnr");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double diff = a.pixels[i] - b.pixels[i];
    acc += diff * diff;
  }
  const double mse = acc / static_cast<double>(a.pixels.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

}  // namespace cbdn::imagelab
