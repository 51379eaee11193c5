#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace iriscs {

/// Dense row-major grid of reals. No range or size constraints; used for
/// solver iterates, gradients and anything else that is "image shaped".
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, double fill = 0.0);
  Grid(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool same_shape(const Grid& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Validated grayscale image: at least 8x8, every intensity finite.
/// Intensities stay real-valued; quantization to 8 bits happens on save.
class GrayImage {
 public:
  static constexpr std::size_t kMinSide = 8;

  explicit GrayImage(Grid pixels);
  GrayImage(std::size_t height, std::size_t width, std::vector<double> values);

  std::size_t height() const noexcept { return pixels_.rows(); }
  std::size_t width() const noexcept { return pixels_.cols(); }
  double operator()(std::size_t r, std::size_t c) const noexcept { return pixels_(r, c); }
  std::span<const double> values() const noexcept { return pixels_.values(); }

  const Grid& grid() const noexcept { return pixels_; }
  operator const Grid&() const noexcept { return pixels_; }  // NOLINT(google-explicit-constructor)

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  Grid pixels_;
};

struct DatasetEntry {
  std::filesystem::path path;  // resolved against the manifest root
  std::string label;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<DatasetEntry> entries;
};

namespace imagekit {

/// Reads an 8-bit grayscale P5 PGM or PNG, sniffing the format from the
/// file signature rather than the extension.
GrayImage load_image(const std::filesystem::path& path);

/// Writes PNG when the extension is ".png", P5 PGM otherwise. Intensities
/// are rounded to nearest and clamped to [0, 255].
void save_image(const GrayImage& img, const std::filesystem::path& path);

/// Rounds to nearest integer and clamps to [0, 255]; what save_image stores.
GrayImage quantize(const GrayImage& img);

/// 10 log10(255^2 / MSE) with a fixed 8-bit peak. Returns +infinity when the
/// images are identical.
double psnr(const GrayImage& reference, const GrayImage& test);

double mean_squared_error(const Grid& a, const Grid& b);

/// Text manifest: one `relative/path<TAB>label` per line, `#` starts a comment.
/// Relative paths are resolved against the manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace imagekit
}  // namespace iriscs
