#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iriscs/imagekit.hpp"

namespace iriscs {

/// Half-open angular interval [begin, end) in radians, taken modulo 2*pi.
/// Angles follow image coordinates: x = cx + r cos(theta), y = cy + r sin(theta),
/// with y growing downward, so pi/2 points to the bottom of the image.
struct AngularInterval {
  double begin = 0.0;
  double end = 0.0;

  bool contains(double theta) const noexcept;
  friend bool operator==(const AngularInterval&, const AngularInterval&) = default;
};

/// Default eyelid model: the top and bottom quadrants are excluded.
std::vector<AngularInterval> default_exclusion_arcs();

struct LocalizerConfig {
  int pupil_r_min = 8;
  int pupil_r_max = 30;
  int iris_r_min = 30;
  int iris_r_max = 60;
  int center_stride = 2;
  double sigma = 1.0;               // Gaussian width along the radius axis, pixels
  std::size_t angular_samples = 128;
  std::vector<AngularInterval> exclusion_arcs = default_exclusion_arcs();
  double floor_response = 1.0;       // intensity units per pixel
  double iris_center_tolerance = 10.0;
  double min_visible_fraction = 0.5;

  /// Throws InvalidConfig unless 0 < r_min < r_max < min(rows, cols) / 2 for
  /// both ranges, sigma > 0 and at least 64 angular samples.
  void validate(std::size_t rows, std::size_t cols) const;

  friend bool operator==(const LocalizerConfig&, const LocalizerConfig&) = default;
};

struct IrisGeometry {
  double pupil_x = 0.0;
  double pupil_y = 0.0;
  double pupil_r = 0.0;
  double iris_x = 0.0;
  double iris_y = 0.0;
  double iris_r = 0.0;
  /// Fraction of the outer boundary's contour samples that fall inside the frame.
  double visible_fraction = 1.0;
  std::vector<AngularInterval> exclusion_arcs;

  friend bool operator==(const IrisGeometry&, const IrisGeometry&) = default;
};

/// Rubber-sheet sampled iris: radial_res rows (pupil to limbus) by angular_res columns.
struct PolarIris {
  std::size_t radial_res = 16;
  std::size_t angular_res = 240;
  Grid samples;
  std::vector<std::uint8_t> validity;  // row-major, 1 = usable sample

  bool valid(std::size_t r, std::size_t a) const noexcept { return validity[r * angular_res + a] != 0; }
};

/// Complex 2D Gabor filters placed on a regular lattice over the polar grid.
/// Radial quantities are in polar-row units, angular ones in radians.
struct GaborBank {
  std::vector<double> wavelengths;  // carrier angular frequencies omega, radians^-1
  double alpha = 16.0 / 3.0;        // radial envelope width
  double beta = 0.0;                // angular envelope width
  std::size_t radial_sites = 8;
  std::size_t angular_sites = 30;

  /// omega = 2*pi / (2*beta), alpha = radial_res / 3, beta = 2*pi*8 / angular_res,
  /// lattice of 8 radial x 30 angular sites.
  static GaborBank defaults(std::size_t radial_res = 16, std::size_t angular_res = 240);

  friend bool operator==(const GaborBank&, const GaborBank&) = default;
};

/// Bit layout: index ((radial_site * angular_sites + angular_site) * wavelengths + w) * 2 + part,
/// part 0 = sign of the real response, part 1 = sign of the imaginary response.
class IrisCode {
 public:
  IrisCode() = default;
  IrisCode(std::size_t radial_sites, std::size_t angular_sites, std::size_t wavelengths);

  std::size_t radial_sites() const noexcept { return radial_sites_; }
  std::size_t angular_sites() const noexcept { return angular_sites_; }
  std::size_t wavelengths() const noexcept { return wavelengths_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t bits_per_site() const noexcept { return wavelengths_ * 2; }

  bool bit(std::size_t i) const noexcept { return (bits_[i / 64] >> (i % 64)) & 1u; }
  bool mask(std::size_t i) const noexcept { return (mask_[i / 64] >> (i % 64)) & 1u; }
  void set_bit(std::size_t i, bool v) noexcept { assign(bits_, i, v); }
  void set_mask(std::size_t i, bool v) noexcept { assign(mask_, i, v); }
  std::size_t valid_count() const noexcept;

  std::span<const std::uint64_t> bit_words() const noexcept { return bits_; }
  std::span<const std::uint64_t> mask_words() const noexcept { return mask_; }

  /// Magic "IRISCODE", then radial_sites, angular_sites, wavelengths as
  /// little-endian uint32, then code bytes and mask bytes (ceil(size / 8)
  /// each, bit i stored in byte i / 8 at position i % 8).
  std::vector<std::uint8_t> serialize() const;
  static IrisCode deserialize(std::span<const std::uint8_t> bytes);

  friend bool operator==(const IrisCode&, const IrisCode&) = default;

 private:
  static void assign(std::vector<std::uint64_t>& words, std::size_t i, bool v) noexcept {
    const std::uint64_t bit = std::uint64_t{1} << (i % 64);
    words[i / 64] = v ? (words[i / 64] | bit) : (words[i / 64] & ~bit);
  }

  std::size_t radial_sites_ = 0;
  std::size_t angular_sites_ = 0;
  std::size_t wavelengths_ = 0;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> mask_;
};

struct HammingResult {
  double hd = 0.0;
  int shift = 0;  // angular sites; column j of `a` was compared with column j + shift of `b`
  std::size_t disagreeing = 0;
  std::size_t compared = 0;
};

enum class Decision { Pass, Fail };
std::string_view to_string(Decision d) noexcept;

struct IrisPipelineConfig {
  LocalizerConfig localizer;
  std::size_t radial_res = 16;
  std::size_t angular_res = 240;
  GaborBank bank = GaborBank::defaults();
  int max_shift = 8;

  friend bool operator==(const IrisPipelineConfig&, const IrisPipelineConfig&) = default;
};

struct Template {
  IrisGeometry geometry;
  IrisCode code;
};

namespace iris {

inline constexpr double kMatchThreshold = 0.36;

/// |G_sigma * d/dr (mean intensity on the circle of radius r)| at radius r.
/// Circle means use bilinear interpolation over cfg.angular_samples angles,
/// skipping exclusion arcs and points outside the image; the derivative is a
/// central difference, smoothed over radii with a truncated (3 sigma) Gaussian.
double integrodiff_response(const Grid& img, double cx, double cy, int r, const LocalizerConfig& cfg);

/// Exhaustive integro-differential search: pupil first, then the outer
/// boundary with its center within iris_center_tolerance of the pupil center.
IrisGeometry localize(const Grid& img, const LocalizerConfig& cfg);

/// Daugman rubber-sheet remapping, linear between the pupil and iris circles.
PolarIris normalize(const Grid& img, const IrisGeometry& geo, std::size_t radial_res, std::size_t angular_res);

IrisCode encode(const PolarIris& polar, const GaborBank& bank);

/// Minimum masked fractional Hamming distance over cyclic shifts of whole
/// angular columns in [-max_shift, max_shift]. Ties prefer the smaller |shift|,
/// then the negative one.
HammingResult hamming(const IrisCode& a, const IrisCode& b, int max_shift);

/// Pass iff hd < 0.36.
Decision decide(double hd);

/// localize -> normalize -> encode.
Template enroll(const Grid& img, const IrisPipelineConfig& cfg);

std::string to_json(const IrisGeometry& geo);
void save_code(const IrisCode& code, const std::filesystem::path& path);
IrisCode load_code(const std::filesystem::path& path);
/// True when the file starts with the serialized-code magic.
bool is_code_file(const std::filesystem::path& path);
/// Samples as an 8-bit image; invalid samples are written as 0.
GrayImage polar_to_image(const PolarIris& polar);

}  // namespace iris
}  // namespace iriscs
