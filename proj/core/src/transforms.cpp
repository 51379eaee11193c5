#include "iriscs/transforms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "iriscs/error.hpp"

namespace iriscs {

std::string_view to_string(TransformDomain domain) noexcept {
  return domain == TransformDomain::DCT ? "DCT" : "DFT";
}

TransformDomain parse_domain(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "dct") return TransformDomain::DCT;
  if (lower == "dft") return TransformDomain::DFT;
  throw Error(ErrorCode::InvalidConfig, "unknown transform domain '" + std::string(text) + "'");
}

CoeffGrid::CoeffGrid(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols) {}

CoeffGrid::CoeffGrid(std::size_t rows, std::size_t cols, std::vector<value_type> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) throw Error(ErrorCode::DimensionMismatch, "coefficient count mismatch");
}

double CoeffGrid::max_magnitude() const noexcept {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

namespace transforms {
namespace {

// Square N x N matrix in split real/imaginary storage, row-major.
struct Matrix {
  std::size_t n = 0;
  std::vector<double> re;
  std::vector<double> im;
};

// Forward 1D basis: y[k] = sum_n B[k][n] x[n].
Matrix forward_basis(std::size_t n, TransformDomain domain) {
  Matrix b{n, std::vector<double>(n * n), std::vector<double>(n * n, 0.0)};
  const double nd = static_cast<double>(n);
  if (domain == TransformDomain::DCT) {
    for (std::size_t k = 0; k < n; ++k) {
      const double scale = k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
      for (std::size_t j = 0; j < n; ++j) {
        b.re[k * n + j] = scale * std::cos(std::numbers::pi * static_cast<double>((2 * j + 1) * k) / (2.0 * nd));
      }
    }
  } else {
    const double scale = 1.0 / std::sqrt(nd);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        // Reduce k*j mod n first so the angle stays small and exact.
        const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / nd;
        b.re[k * n + j] = scale * std::cos(angle);
        b.im[k * n + j] = -scale * std::sin(angle);
      }
    }
  }
  return b;
}

Matrix transposed(const Matrix& m, bool conjugate) {
  Matrix t{m.n, std::vector<double>(m.re.size()), std::vector<double>(m.im.size())};
  const double sign = conjugate ? -1.0 : 1.0;
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      t.re[j * m.n + i] = m.re[i * m.n + j];
      t.im[j * m.n + i] = sign * m.im[i * m.n + j];
    }
  }
  return t;
}

Matrix conjugated(const Matrix& m) {
  Matrix c = m;
  for (double& v : c.im) v = -v;
  return c;
}

// out = M * in, M is rows x rows, in/out are rows x cols.
template <bool Complex>
void column_pass(const Matrix& m, std::size_t cols, const std::vector<double>& in_re,
                 const std::vector<double>& in_im, std::vector<double>& out_re, std::vector<double>& out_im) {
  const std::size_t rows = m.n;
  std::fill(out_re.begin(), out_re.end(), 0.0);
  std::fill(out_im.begin(), out_im.end(), 0.0);
  for (std::size_t k = 0; k < rows; ++k) {
    double* ore = out_re.data() + k * cols;
    double* oim = out_im.data() + k * cols;
    for (std::size_t j = 0; j < rows; ++j) {
      const double a = m.re[k * rows + j];
      const double b = m.im[k * rows + j];
      const double* ire = in_re.data() + j * cols;
      const double* iim = in_im.data() + j * cols;
      if constexpr (Complex) {
        for (std::size_t c = 0; c < cols; ++c) {
          ore[c] += a * ire[c] - b * iim[c];
          oim[c] += a * iim[c] + b * ire[c];
        }
      } else {
        for (std::size_t c = 0; c < cols; ++c) ore[c] += a * ire[c];
      }
    }
  }
}

// out = in * MT, MT is cols x cols (already transposed), in/out are rows x cols.
template <bool Complex>
void row_pass(const Matrix& mt, std::size_t rows, const std::vector<double>& in_re,
              const std::vector<double>& in_im, std::vector<double>& out_re, std::vector<double>& out_im) {
  const std::size_t cols = mt.n;
  std::fill(out_re.begin(), out_re.end(), 0.0);
  std::fill(out_im.begin(), out_im.end(), 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double* ore = out_re.data() + r * cols;
    double* oim = out_im.data() + r * cols;
    for (std::size_t j = 0; j < cols; ++j) {
      const double x = in_re[r * cols + j];
      const double y = in_im[r * cols + j];
      const double* mre = mt.re.data() + j * cols;
      const double* mim = mt.im.data() + j * cols;
      if constexpr (Complex) {
        for (std::size_t c = 0; c < cols; ++c) {
          ore[c] += x * mre[c] - y * mim[c];
          oim[c] += x * mim[c] + y * mre[c];
        }
      } else {
        for (std::size_t c = 0; c < cols; ++c) ore[c] += x * mre[c];
      }
    }
  }
}

}  // namespace

struct PlanTables {
  Matrix row_fwd;   // B_r
  Matrix row_inv;   // B_r^H
  Matrix col_fwdT;  // B_c^T
  Matrix col_invT;  // conj(B_c)
};

}  // namespace transforms
}  // namespace iriscs

namespace iriscs::transforms {

Plan::Plan(std::size_t rows, std::size_t cols, TransformDomain domain)
    : rows_(rows), cols_(cols), domain_(domain) {
  if (rows == 0 || cols == 0) throw Error(ErrorCode::DimensionMismatch, "empty transform plan");
  auto tables = std::make_shared<PlanTables>();
  tables->row_fwd = forward_basis(rows, domain);
  tables->row_inv = transposed(tables->row_fwd, /*conjugate=*/true);
  const Matrix col = forward_basis(cols, domain);
  tables->col_fwdT = transposed(col, /*conjugate=*/false);
  tables->col_invT = conjugated(col);
  tables_ = std::move(tables);
}

CoeffGrid Plan::forward(const Grid& image) const {
  if (image.rows() != rows_ || image.cols() != cols_) {
    throw Error(ErrorCode::DimensionMismatch, "image does not match transform plan size");
  }
  const std::size_t n = rows_ * cols_;
  std::vector<double> a_re(image.values().begin(), image.values().end());
  std::vector<double> a_im(n, 0.0);
  std::vector<double> b_re(n), b_im(n);
  CoeffGrid out(rows_, cols_);
  if (domain_ == TransformDomain::DCT) {
    row_pass<false>(tables_->col_fwdT, rows_, a_re, a_im, b_re, b_im);
    column_pass<false>(tables_->row_fwd, cols_, b_re, b_im, a_re, a_im);
    for (std::size_t i = 0; i < n; ++i) out[i] = {a_re[i], 0.0};
  } else {
    row_pass<true>(tables_->col_fwdT, rows_, a_re, a_im, b_re, b_im);
    column_pass<true>(tables_->row_fwd, cols_, b_re, b_im, a_re, a_im);
    for (std::size_t i = 0; i < n; ++i) out[i] = {a_re[i], a_im[i]};
  }
  return out;
}

Synthesis Plan::inverse(const CoeffGrid& coeffs) const {
  if (coeffs.rows() != rows_ || coeffs.cols() != cols_) {
    throw Error(ErrorCode::DimensionMismatch, "coefficients do not match transform plan size");
  }
  const std::size_t n = rows_ * cols_;
  std::vector<double> a_re(n), a_im(n);
  for (std::size_t i = 0; i < n; ++i) {
    a_re[i] = coeffs[i].real();
    a_im[i] = coeffs[i].imag();
  }
  std::vector<double> b_re(n), b_im(n);
  Synthesis out{Grid(rows_, cols_), 0.0};
  if (domain_ == TransformDomain::DCT) {
    column_pass<false>(tables_->row_inv, cols_, a_re, a_im, b_re, b_im);
    row_pass<false>(tables_->col_invT, rows_, b_re, b_im, a_re, a_im);
  } else {
    column_pass<true>(tables_->row_inv, cols_, a_re, a_im, b_re, b_im);
    row_pass<true>(tables_->col_invT, rows_, b_re, b_im, a_re, a_im);
    double imag_energy = 0.0;
    for (double v : a_im) imag_energy += v * v;
    out.discarded_imag_norm = std::sqrt(imag_energy);
  }
  std::copy(a_re.begin(), a_re.end(), out.image.values().begin());
  return out;
}

CoeffGrid forward(const Grid& image, TransformDomain domain) {
  return Plan(image.rows(), image.cols(), domain).forward(image);
}

Synthesis inverse(const CoeffGrid& coeffs, TransformDomain domain) {
  return Plan(coeffs.rows(), coeffs.cols(), domain).inverse(coeffs);
}

CoeffGrid hard_threshold(const CoeffGrid& coeffs, double keep_fraction) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidFraction, "keep_fraction must lie in (0, 1], got " + std::to_string(keep_fraction));
  }
  const std::size_t n = coeffs.size();
  // The small slack keeps e.g. 0.3 * 10 from rounding up to 4.
  const auto keep = std::min(n, static_cast<std::size_t>(std::ceil(keep_fraction * static_cast<double>(n) - 1e-9)));
  if (keep == n) return coeffs;

  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(coeffs[i]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto ranks_before = [&](std::size_t a, std::size_t b) {
    return mag[a] != mag[b] ? mag[a] > mag[b] : a < b;
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), ranks_before);

  CoeffGrid out(coeffs.rows(), coeffs.cols());
  for (std::size_t i = 0; i < keep; ++i) out[order[i]] = coeffs[order[i]];
  return out;
}

CoeffGrid hard_threshold_below(const CoeffGrid& coeffs, double tau) {
  CoeffGrid out = coeffs;
  for (auto& v : out.values()) {
    if (std::abs(v) < tau) v = 0.0;
  }
  return out;
}

CoeffGrid soft_threshold(const CoeffGrid& coeffs, double tau) {
  CoeffGrid out = coeffs;
  for (auto& v : out.values()) {
    const double mag = std::abs(v);
    v = mag <= tau ? CoeffGrid::value_type{0.0, 0.0} : v * ((mag - tau) / mag);
  }
  return out;
}

}  // namespace iriscs::transforms
