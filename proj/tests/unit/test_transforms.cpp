#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "iriscs/error.hpp"
#include "iriscs/transforms.hpp"
#include "synthetic.hpp"

using namespace iriscs;
using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// Direct-summation oracles, written from the textbook definitions.
CoeffGrid naive_dct(const Grid& x) {
  const std::size_t M = x.rows(), N = x.cols();
  CoeffGrid out(M, N);
  for (std::size_t u = 0; u < M; ++u) {
    for (std::size_t v = 0; v < N; ++v) {
      double acc = 0.0;
      for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < N; ++j)
          acc += x(i, j) * std::cos(kPi * (2.0 * i + 1) * u / (2.0 * M)) * std::cos(kPi * (2.0 * j + 1) * v / (2.0 * N));
      const double au = u == 0 ? std::sqrt(1.0 / M) : std::sqrt(2.0 / M);
      const double av = v == 0 ? std::sqrt(1.0 / N) : std::sqrt(2.0 / N);
      out(u, v) = au * av * acc;
    }
  }
  return out;
}

CoeffGrid naive_dft(const Grid& x) {
  const std::size_t M = x.rows(), N = x.cols();
  CoeffGrid out(M, N);
  for (std::size_t u = 0; u < M; ++u) {
    for (std::size_t v = 0; v < N; ++v) {
      cplx acc = 0.0;
      for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < N; ++j)
          acc += x(i, j) * std::polar(1.0, -2.0 * kPi * (double(u * i) / M + double(v * j) / N));
      out(u, v) = acc / std::sqrt(double(M * N));
    }
  }
  return out;
}

double energy(const Grid& g) {
  double e = 0.0;
  for (double v : g.values()) e += v * v;
  return e;
}

double energy(const CoeffGrid& c) {
  double e = 0.0;
  for (const auto& v : c.values()) e += std::norm(v);
  return e;
}

double max_diff(const Grid& a, const Grid& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("forward matches direct summation") {
  const Grid x = testing::random_grid(6, 10, 11);
  const auto dct = transforms::forward(x, TransformDomain::DCT);
  const auto dft = transforms::forward(x, TransformDomain::DFT);
  const auto odct = naive_dct(x);
  const auto odft = naive_dft(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(dct[i] - odct[i]) < 1e-9);
    CHECK(std::abs(dft[i] - odft[i]) < 1e-9);
  }
}

TEST_CASE("constant image concentrates in the DC coefficient") {
  const double c = 37.5;
  for (auto dom : {TransformDomain::DCT, TransformDomain::DFT}) {
    const auto coeffs = transforms::forward(Grid(12, 20, c), dom);
    CHECK(std::abs(coeffs(0, 0) - cplx(c * std::sqrt(240.0), 0.0)) < 1e-9);
    for (std::size_t i = 1; i < coeffs.size(); ++i) CHECK(std::abs(coeffs[i]) < 1e-9);
    const auto zero = transforms::forward(Grid(8, 8), dom);
    for (const auto& v : zero.values()) CHECK(v == cplx(0.0, 0.0));
  }
}

TEST_CASE("inverse of a unit DC coefficient is flat 1/16 on 16x16") {
  for (auto dom : {TransformDomain::DCT, TransformDomain::DFT}) {
    CoeffGrid c(16, 16);
    c(0, 0) = 1.0;
    const auto s = transforms::inverse(c, dom);
    for (double v : s.image.values()) CHECK(std::abs(v - 1.0 / 16.0) < 1e-12);
    const auto z = transforms::inverse(CoeffGrid(16, 16), dom);
    for (double v : z.image.values()) CHECK(v == 0.0);
  }
}

TEST_CASE("round trip, Parseval and linearity") {
  Grid ramp(32, 32);
  for (std::size_t r = 0; r < 32; ++r)
    for (std::size_t c = 0; c < 32; ++c) ramp(r, c) = 3.0 * r + c;
  for (auto dom : {TransformDomain::DCT, TransformDomain::DFT}) {
    CAPTURE(to_string(dom));
    const auto back = transforms::inverse(transforms::forward(ramp, dom), dom);
    CHECK(max_diff(back.image, ramp) < 1e-8);
    CHECK(back.discarded_imag_norm < 1e-8);

    const Grid x = testing::random_grid(8, 8, 5);
    CHECK(std::abs(energy(transforms::forward(x, dom)) - energy(x)) < 1e-10 * energy(x));

    const Grid y = testing::random_grid(8, 8, 6);
    Grid combo(8, 8);
    for (std::size_t i = 0; i < 64; ++i) combo[i] = 2.5 * x[i] - 0.75 * y[i];
    const auto fx = transforms::forward(x, dom), fy = transforms::forward(y, dom), fc = transforms::forward(combo, dom);
    for (std::size_t i = 0; i < 64; ++i) CHECK(std::abs(fc[i] - (2.5 * fx[i] - 0.75 * fy[i])) < 1e-9);
  }
}

TEST_CASE("DCT is real, DFT is conjugate symmetric") {
  const Grid x = testing::random_grid(9, 7, 8);
  const auto dct = transforms::forward(x, TransformDomain::DCT);
  for (const auto& v : dct.values()) CHECK(v.imag() == 0.0);
  const auto dft = transforms::forward(x, TransformDomain::DFT);
  for (std::size_t u = 0; u < 9; ++u)
    for (std::size_t v = 0; v < 7; ++v) CHECK(std::abs(dft(u, v) - std::conj(dft((9 - u) % 9, (7 - v) % 7))) < 1e-10);
}

TEST_CASE("Plan agrees with the free functions and checks shape") {
  const Grid x = testing::random_grid(10, 12, 9);
  const transforms::Plan plan(10, 12, TransformDomain::DFT);
  CHECK(plan.forward(x) == transforms::forward(x, TransformDomain::DFT));
  CHECK_THROWS_AS(plan.forward(Grid(12, 10)), Error);
}

TEST_CASE("hard_threshold") {
  CoeffGrid c(2, 2, {4.0, 3.0, 2.0, 1.0});
  CHECK(transforms::hard_threshold(c, 1.0) == c);
  CHECK(transforms::hard_threshold(c, 0.5) == CoeffGrid(2, 2, {4.0, 3.0, 0.0, 0.0}));

  CoeffGrid reordered(2, 2, {1.0, cplx(0.0, -3.0), 4.0, 2.0});
  CHECK(transforms::hard_threshold(reordered, 0.5) == CoeffGrid(2, 2, {0.0, cplx(0.0, -3.0), 4.0, 0.0}));

  CoeffGrid flat(2, 2, {5.0, -5.0, cplx(0.0, 5.0), 5.0});
  CHECK(transforms::hard_threshold(flat, 0.25) == CoeffGrid(2, 2, {5.0, 0.0, 0.0, 0.0}));
  CHECK(transforms::hard_threshold(flat, 0.5) == CoeffGrid(2, 2, {5.0, -5.0, 0.0, 0.0}));

  CHECK_THROWS_AS(transforms::hard_threshold(c, 0.0), Error);
  CHECK_THROWS_AS(transforms::hard_threshold(c, 1.5), Error);

  // Kept values are bit-exact, nothing grows.
  const auto big = transforms::forward(testing::random_grid(16, 16, 2), TransformDomain::DFT);
  const auto kept = transforms::hard_threshold(big, 0.1);
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < big.size(); ++i) {
    CHECK((kept[i] == big[i] || kept[i] == cplx(0.0, 0.0)));
    nonzero += kept[i] != cplx(0.0, 0.0);
  }
  CHECK(nonzero == 26);  // ceil(0.1 * 256)
}

TEST_CASE("value thresholds") {
  CoeffGrid c(2, 2, {cplx(3.0, 4.0), -1.0, 2.0, 0.5});
  CHECK(transforms::hard_threshold_below(c, 2.0) == CoeffGrid(2, 2, {cplx(3.0, 4.0), 0.0, 2.0, 0.0}));
  const auto s = transforms::soft_threshold(c, 1.0);
  CHECK(std::abs(s(0, 0) - cplx(2.4, 3.2)) < 1e-12);
  CHECK(s(0, 1) == cplx(0.0, 0.0));
  CHECK(std::abs(s(1, 0) - cplx(1.0, 0.0)) < 1e-12);
  CHECK(s(1, 1) == cplx(0.0, 0.0));
}
