#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "iriscs/imagekit.hpp"

namespace iriscs {

/// Random pixel-subsampling pattern. `kept` is row-major, one byte per pixel.
struct SampleMask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> kept;
  double fraction = 0.0;
  std::uint64_t seed = 0;

  bool is_kept(std::size_t r, std::size_t c) const noexcept { return kept[r * cols + c] != 0; }
  std::size_t count() const noexcept;

  friend bool operator==(const SampleMask&, const SampleMask&) = default;
};

struct Measurement {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

/// Observed pixels, strictly increasing in row-major order.
struct Measurements {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Measurement> values;

  double mean() const noexcept;
};

namespace sampling {

/// Number of pixels a mask of this fraction keeps: round-half-up of fraction * n.
std::size_t kept_count(std::size_t rows, std::size_t cols, double fraction);

/// Uniform sampling without replacement. The algorithm is fixed so masks are
/// reproducible everywhere:
///   1. engine = std::mt19937_64(seed)
///   2. Fisher-Yates over indices 0..n-1, for i = n-1 down to 1 swap i with
///      j = bounded(i + 1), where bounded(b) draws x from the engine until
///      x >= (2^64 - b) mod b and returns x mod b
///   3. keep the first kept_count() shuffled indices
/// Throws InvalidFraction for fractions outside (0, 1] or an empty mask.
SampleMask generate_mask(std::size_t rows, std::size_t cols, double fraction, std::uint64_t seed);

Measurements measure(const Grid& img, const SampleMask& mask);

/// Grid with measured values at their positions and `fill` everywhere else.
Grid embed(const Measurements& measurements, double fill);

/// Binary PBM (P4), black = kept.
void write_mask_pbm(const SampleMask& mask, const std::filesystem::path& path);
/// CSV with header `row,col,value`.
void write_measurements_csv(const Measurements& measurements, const std::filesystem::path& path);

}  // namespace sampling
}  // namespace iriscs
