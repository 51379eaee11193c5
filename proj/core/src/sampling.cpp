#include "iriscs/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "iriscs/error.hpp"

namespace iriscs {

std::size_t SampleMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(kept.begin(), kept.end(), std::uint8_t{1}));
}

double Measurements::mean() const noexcept {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& m : values) acc += m.value;
  return acc / static_cast<double>(values.size());
}

namespace sampling {
namespace {

std::uint64_t bounded(std::mt19937_64& engine, std::uint64_t bound) {
  const std::uint64_t threshold = (std::numeric_limits<std::uint64_t>::max() - bound + 1) % bound;
  for (;;) {
    const std::uint64_t x = engine();
    if (x >= threshold) return x % bound;
  }
}

}  // namespace

std::size_t kept_count(std::size_t rows, std::size_t cols, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidFraction, "sampling fraction must lie in (0, 1], got " + std::to_string(fraction));
  }
  const double exact = fraction * static_cast<double>(rows * cols);
  return std::min(rows * cols, static_cast<std::size_t>(std::floor(exact + 0.5)));
}

SampleMask generate_mask(std::size_t rows, std::size_t cols, double fraction, std::uint64_t seed) {
  const std::size_t m = kept_count(rows, cols, fraction);
  if (m == 0) {
    throw Error(ErrorCode::InvalidFraction, "fraction " + std::to_string(fraction) + " keeps no pixels of a " +
                                                std::to_string(rows) + "x" + std::to_string(cols) + " grid");
  }
  const std::size_t n = rows * cols;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 engine(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[bounded(engine, i + 1)]);
  }
  SampleMask mask{rows, cols, std::vector<std::uint8_t>(n, 0), fraction, seed};
  for (std::size_t i = 0; i < m; ++i) mask.kept[order[i]] = 1;
  return mask;
}

Measurements measure(const Grid& img, const SampleMask& mask) {
  if (img.rows() != mask.rows || img.cols() != mask.cols) {
    throw Error(ErrorCode::DimensionMismatch, "mask and image sizes differ");
  }
  Measurements out{mask.rows, mask.cols, {}};
  out.values.reserve(mask.count());
  for (std::size_t r = 0; r < mask.rows; ++r) {
    for (std::size_t c = 0; c < mask.cols; ++c) {
      if (mask.is_kept(r, c)) out.values.push_back({r, c, img(r, c)});
    }
  }
  return out;
}

Grid embed(const Measurements& measurements, double fill) {
  Grid out(measurements.rows, measurements.cols, fill);
  for (const auto& m : measurements.values) out(m.row, m.col) = m.value;
  return out;
}

void write_mask_pbm(const SampleMask& mask, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "P4\n" << mask.cols << ' ' << mask.rows << '\n';
  const std::size_t stride = (mask.cols + 7) / 8;
  std::vector<unsigned char> row(stride);
  for (std::size_t r = 0; r < mask.rows; ++r) {
    std::fill(row.begin(), row.end(), 0);
    for (std::size_t c = 0; c < mask.cols; ++c) {
      if (mask.is_kept(r, c)) row[c / 8] |= static_cast<unsigned char>(0x80u >> (c % 8));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(stride));
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void write_measurements_csv(const Measurements& measurements, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "row,col,value\n";
  out.precision(17);
  for (const auto& m : measurements.values) out << m.row << ',' << m.col << ',' << m.value << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace sampling
}  // namespace iriscs
