#pragma once

#include <complex>
#include <memory>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "iriscs/imagekit.hpp"

namespace iriscs {

enum class TransformDomain { DCT, DFT };

std::string_view to_string(TransformDomain domain) noexcept;
/// Accepts "dct"/"dft" in any case; throws InvalidConfig otherwise.
TransformDomain parse_domain(std::string_view text);

/// Transform-domain coefficients, row-major. DCT grids carry zero imaginary parts.
class CoeffGrid {
 public:
  using value_type = std::complex<double>;

  CoeffGrid() = default;
  CoeffGrid(std::size_t rows, std::size_t cols);
  CoeffGrid(std::size_t rows, std::size_t cols, std::vector<value_type> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }

  value_type& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
  const value_type& operator()(std::size_t r, std::size_t c) const noexcept {
    return values_[r * cols_ + c];
  }
  value_type& operator[](std::size_t i) noexcept { return values_[i]; }
  const value_type& operator[](std::size_t i) const noexcept { return values_[i]; }

  std::span<value_type> values() noexcept { return values_; }
  std::span<const value_type> values() const noexcept { return values_; }

  double max_magnitude() const noexcept;

  friend bool operator==(const CoeffGrid&, const CoeffGrid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<value_type> values_;
};

/// Result of a synthesis. For the DFT the imaginary part is dropped; its
/// Euclidean norm is reported so callers can track how much was discarded.
struct Synthesis {
  Grid image;
  double discarded_imag_norm = 0.0;
};

namespace transforms {

struct PlanTables;

/// Precomputed separable basis tables for one (rows, cols, domain). The DCT is
/// the orthonormal DCT-II / DCT-III pair; the DFT is scaled by 1/sqrt(n) in
/// both directions, so Parseval holds for either domain.
///
/// Each 2D transform is two dense matrix passes (O(n^3) for n x n); plenty
/// fast for images up to 512 x 512. A Plan is immutable and may be shared.
class Plan {
 public:
  Plan(std::size_t rows, std::size_t cols, TransformDomain domain);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  TransformDomain domain() const noexcept { return domain_; }

  CoeffGrid forward(const Grid& image) const;
  Synthesis inverse(const CoeffGrid& coeffs) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  TransformDomain domain_;
  std::shared_ptr<const PlanTables> tables_;
};

CoeffGrid forward(const Grid& image, TransformDomain domain);
Synthesis inverse(const CoeffGrid& coeffs, TransformDomain domain);

/// Keeps the ceil(keep_fraction * n) largest-magnitude coefficients and zeroes
/// the rest. Equal magnitudes are ranked by row-major index, lower first.
CoeffGrid hard_threshold(const CoeffGrid& coeffs, double keep_fraction);

/// Zeroes every coefficient whose magnitude is strictly below `tau`.
CoeffGrid hard_threshold_below(const CoeffGrid& coeffs, double tau);

/// Shrinks magnitudes by `tau` (clamped at zero) and keeps the phase.
CoeffGrid soft_threshold(const CoeffGrid& coeffs, double tau);

}  // namespace transforms
}  // namespace iriscs
