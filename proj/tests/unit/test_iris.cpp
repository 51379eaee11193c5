#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "iriscs/error.hpp"
#include "iriscs/iris.hpp"
#include "scratch_dir.hpp"
#include "synthetic.hpp"

using namespace iriscs;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an iriscs::Error");
  return ErrorCode::IoError;
}

LocalizerConfig open_localizer() {
  LocalizerConfig cfg;
  cfg.exclusion_arcs.clear();
  return cfg;
}

IrisGeometry concentric(double cx, double cy, double rp, double ri) {
  IrisGeometry g;
  g.pupil_x = g.iris_x = cx;
  g.pupil_y = g.iris_y = cy;
  g.pupil_r = rp;
  g.iris_r = ri;
  return g;
}

// Smooth angular pattern inside a concentric annulus around (63.5, 63.5).
Grid angular_pattern() {
  Grid g(128, 128);
  for (std::size_t r = 0; r < 128; ++r) {
    for (std::size_t c = 0; c < 128; ++c) {
      const double dx = c - 63.5, dy = r - 63.5;
      const double theta = std::atan2(dy, dx), rho = std::hypot(dx, dy);
      g(r, c) = 120 + 40 * std::sin(3 * theta) + 25 * std::cos(7 * theta + 0.15 * rho) + 0.5 * rho;
    }
  }
  return g;
}

IrisCode random_code(std::mt19937_64& rng, std::size_t rs, std::size_t as, std::size_t nw, double mask_density) {
  IrisCode code(rs, as, nw);
  std::bernoulli_distribution bit(0.5), valid(mask_density);
  for (std::size_t i = 0; i < code.size(); ++i) {
    code.set_bit(i, bit(rng));
    code.set_mask(i, valid(rng));
  }
  return code;
}

IrisCode complement(const IrisCode& code) {
  IrisCode out = code;
  for (std::size_t i = 0; i < code.size(); ++i) out.set_bit(i, !code.bit(i));
  return out;
}

}  // namespace

TEST_CASE("angular intervals and defaults") {
  const AngularInterval top{kPi / 4, 3 * kPi / 4};
  CHECK(top.contains(kPi / 2));
  CHECK(top.contains(kPi / 4));
  CHECK_FALSE(top.contains(3 * kPi / 4));
  CHECK(top.contains(kPi / 2 + 2 * kPi));
  const AngularInterval wrap{7 * kPi / 4, kPi / 4};
  CHECK(wrap.contains(0.0));
  CHECK(wrap.contains(-0.1));
  CHECK_FALSE(wrap.contains(kPi));
  CHECK(default_exclusion_arcs().size() == 2);

  const auto bank = GaborBank::defaults(16, 240);
  CHECK(bank.radial_sites == 8);
  CHECK(bank.angular_sites == 30);
  CHECK(bank.alpha == doctest::Approx(16.0 / 3.0));
  CHECK(bank.beta == doctest::Approx(2 * kPi * 8 / 240));
  REQUIRE(bank.wavelengths.size() == 1);
  CHECK(bank.wavelengths[0] == doctest::Approx(2 * kPi / (2 * bank.beta)));
}

TEST_CASE("localizer config validation") {
  LocalizerConfig cfg;
  CHECK_NOTHROW(cfg.validate(128, 128));
  CHECK_THROWS_AS(cfg.validate(100, 100), Error);  // iris_r_max 60 >= 50
  cfg.sigma = 0.0;
  CHECK_THROWS_AS(cfg.validate(128, 128), Error);
  cfg = {};
  cfg.angular_samples = 32;
  CHECK_THROWS_AS(cfg.validate(128, 128), Error);
  cfg = {};
  cfg.pupil_r_min = 30;
  CHECK_THROWS_AS(cfg.validate(128, 128), Error);
}

TEST_CASE("integrodiff_response") {
  const LocalizerConfig cfg;
  CHECK(std::abs(iris::integrodiff_response(Grid(64, 64, 90.0), 32, 32, 12, cfg)) < 1e-9);

  testing::EyeSpec disk;
  disk.rows = disk.cols = 96;
  disk.pupil = {48, 48, 20};
  disk.iris = {48, 48, 20};
  disk.pupil_level = 0;
  disk.sclera_level = 200;
  const auto img = testing::synthetic_eye(disk);
  const double at = iris::integrodiff_response(img, 48, 48, 20, cfg);
  CHECK(at > iris::integrodiff_response(img, 48, 48, 15, cfg));
  CHECK(at > iris::integrodiff_response(img, 48, 48, 25, cfg));
}

TEST_CASE("localize the synthetic eye") {
  const auto eye = testing::synthetic_eye({});
  const auto geo = iris::localize(eye, LocalizerConfig{});
  CHECK(std::abs(geo.pupil_x - 64) <= 2);
  CHECK(std::abs(geo.pupil_y - 64) <= 2);
  CHECK(std::abs(geo.pupil_r - 20) <= 2);
  CHECK(std::abs(geo.iris_x - 64) <= 2);
  CHECK(std::abs(geo.iris_y - 64) <= 2);
  CHECK(std::abs(geo.iris_r - 50) <= 2);
  CHECK(geo.visible_fraction == 1.0);

  testing::EyeSpec brighter;
  brighter.offset = 30.0;
  CHECK(iris::localize(testing::synthetic_eye(brighter), LocalizerConfig{}) == geo);

  testing::EyeSpec off;
  off.pupil = {58, 70, 16};
  off.iris = {60, 69, 44};
  const auto g2 = iris::localize(testing::synthetic_eye(off), LocalizerConfig{});
  CHECK(std::abs(g2.pupil_x - 58) <= 2);
  CHECK(std::abs(g2.pupil_y - 70) <= 2);
  CHECK(std::abs(g2.pupil_r - 16) <= 2);
  CHECK(std::abs(g2.iris_x - 60) <= 2);
  CHECK(std::abs(g2.iris_y - 69) <= 2);
  CHECK(std::abs(g2.iris_r - 44) <= 2);
}

TEST_CASE("localize rejections") {
  CHECK(code_of([] { iris::localize(Grid(128, 128, 100.0), LocalizerConfig{}); }) == ErrorCode::LocalizationFailed);

  // Iris circle about (20, 20) with radius 50: about 62% of it is off-frame.
  testing::EyeSpec corner;
  corner.pupil = {20, 20, 12};
  corner.iris = {20, 20, 50};
  CHECK(code_of([&] { iris::localize(testing::synthetic_eye(corner), LocalizerConfig{}); }) ==
        ErrorCode::VisibilityRejected);
}

TEST_CASE("normalize: radial function gives constant rows") {
  // Rings of constant intensity whose boundaries sit midway between the
  // sampled radii, so every bilinear stencil stays inside one ring.
  const double cx = 63.5, cy = 63.5, rp = 20, ri = 50;
  const std::size_t R = 8;
  const double step = (ri - rp) / R;
  Grid g(128, 128);
  for (std::size_t r = 0; r < 128; ++r) {
    for (std::size_t c = 0; c < 128; ++c) {
      const double rho = std::hypot(c - cx, r - cy);
      g(r, c) = 10.0 + 7.0 * std::floor((rho - rp) / step);
    }
  }
  const auto polar = iris::normalize(g, concentric(cx, cy, rp, ri), R, 240);
  for (std::size_t i = 0; i < R; ++i) {
    for (std::size_t j = 0; j < 240; ++j) {
      CHECK(polar.valid(i, j));
      CHECK(std::abs(polar.samples(i, j) - polar.samples(i, 0)) < 1e-6);
    }
    CHECK(polar.samples(i, 0) == doctest::Approx(10.0 + 7.0 * i));
  }
}

TEST_CASE("normalize: rotation shifts columns") {
  const Grid img = angular_pattern();
  const auto geo = concentric(63.5, 63.5, 18, 48);
  const auto base = iris::normalize(img, geo, 16, 240);

  // Quarter turn about the pixel-grid center is an exact index permutation.
  Grid quarter(128, 128);
  for (std::size_t r = 0; r < 128; ++r)
    for (std::size_t c = 0; c < 128; ++c) quarter(r, c) = img(127 - c, r);
  const auto turned = iris::normalize(quarter, geo, 16, 240);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 240; ++j) CHECK(std::abs(turned.samples(i, j) - base.samples(i, (j + 180) % 240)) < 1e-9);

  // Arbitrary angle through resampling: compare against the shifted grid.
  const double delta = 2 * kPi * 7 / 240;
  const auto resampled = iris::normalize(testing::rotate(img, 63.5, 63.5, delta, 0.0), geo, 16, 240);
  double worst = 0.0;
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 240; ++j)
      worst = std::max(worst, std::abs(resampled.samples(i, j) - base.samples(i, (j + 240 - 7) % 240)));
  CHECK(worst < 3.0);
}

TEST_CASE("normalize: validity follows the frame") {
  const Grid img = angular_pattern();
  const auto geo = concentric(64, 30, 15, 45);
  const auto polar = iris::normalize(img, geo, 16, 240);
  std::size_t invalid = 0;
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::size_t j = 0; j < 240; ++j) {
      const double t = (i + 0.5) / 16.0, theta = 2 * kPi * j / 240.0;
      const double rho = 15 + t * 30;
      const double y = 30 + rho * std::sin(theta);
      const double x = 64 + rho * std::cos(theta);
      const bool inside = x >= 0 && x <= 127 && y >= 0 && y <= 127;
      CHECK(polar.valid(i, j) == inside);
      invalid += !inside;
    }
  }
  CHECK(invalid > 0);

  auto arcs = geo;
  arcs.exclusion_arcs = {{kPi / 4, 3 * kPi / 4}};
  const auto masked = iris::normalize(img, arcs, 16, 240);
  CHECK_FALSE(masked.valid(0, 60));  // theta = pi / 2
  CHECK(masked.valid(0, 0));

  CHECK_THROWS_AS(iris::normalize(img, concentric(64, 64, 40, 30), 16, 240), Error);
}

TEST_CASE("encode") {
  const auto bank = GaborBank::defaults();
  PolarIris flat{16, 240, Grid(16, 240, 77.0), std::vector<std::uint8_t>(16 * 240, 1)};
  const auto blank = iris::encode(flat, bank);
  CHECK(blank.size() == 480);
  CHECK(blank.valid_count() == 0);

  const auto polar = iris::normalize(angular_pattern(), concentric(63.5, 63.5, 18, 48), 16, 240);
  const auto code = iris::encode(polar, bank);
  CHECK(code.valid_count() > 400);

  // One lattice step (8 columns) permutes whole code columns.
  PolarIris shifted = polar;
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 240; ++j) shifted.samples(i, j) = polar.samples(i, (j + 240 - 8) % 240);
  const auto scode = iris::encode(shifted, bank);
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t a = 0; a < 30; ++a) {
      for (std::size_t k = 0; k < 2; ++k) {
        const std::size_t src = (r * 30 + a) * 2 + k, dst = (r * 30 + (a + 1) % 30) * 2 + k;
        CHECK(scode.mask(dst) == code.mask(src));
        if (code.mask(src)) CHECK(scode.bit(dst) == code.bit(src));
      }
    }
  }
  const auto hr = iris::hamming(code, scode, 2);
  CHECK(hr.hd == 0.0);
  CHECK(hr.shift == 1);

  PolarIris negated = polar;
  for (double& v : negated.samples.values()) v = -v;
  const auto ncode = iris::encode(negated, bank);
  CHECK(iris::hamming(code, ncode, 0).hd == 1.0);

  GaborBank odd = bank;
  odd.angular_sites = 7;
  CHECK(code_of([&] { iris::encode(polar, odd); }) == ErrorCode::LatticeMismatch);
  odd = bank;
  odd.wavelengths.clear();
  CHECK(code_of([&] { iris::encode(polar, odd); }) == ErrorCode::LatticeMismatch);
}

TEST_CASE("hamming against a brute-force oracle") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_code(rng, 1, 8, 4, 0.7);
    const auto b = random_code(rng, 1, 8, 4, 0.7);
    const int max_shift = trial % 5;
    double best = 2.0;
    int best_shift = 0;
    for (int step = 0; step <= 2 * max_shift; ++step) {
      const int s = step == 0 ? 0 : (step % 2 ? -(step + 1) / 2 : step / 2);
      int diff = 0, joint = 0;
      for (int col = 0; col < 8; ++col) {
        const int other = ((col + s) % 8 + 8) % 8;
        for (int k = 0; k < 8; ++k) {
          const std::size_t i = col * 8 + k, j = other * 8 + k;
          if (a.mask(i) && b.mask(j)) {
            ++joint;
            diff += a.bit(i) != b.bit(j);
          }
        }
      }
      if (joint > 0 && static_cast<double>(diff) / joint < best) {
        best = static_cast<double>(diff) / joint;
        best_shift = s;
      }
    }
    const auto got = iris::hamming(a, b, max_shift);
    CHECK(got.hd == best);
    CHECK(got.shift == best_shift);
  }
}

TEST_CASE("hamming identities") {
  std::mt19937_64 rng(5);
  const auto a = random_code(rng, 8, 30, 1, 1.0);
  CHECK(iris::hamming(a, a, 8).hd == 0.0);
  CHECK(iris::hamming(a, a, 8).shift == 0);
  CHECK(iris::hamming(a, complement(a), 0).hd == 1.0);

  const auto b = random_code(rng, 8, 30, 1, 0.8);
  const auto ab = iris::hamming(a, b, 0), ba = iris::hamming(b, a, 0);
  CHECK(ab.hd == ba.hd);
  const auto sab = iris::hamming(a, b, 6), sba = iris::hamming(b, a, 6);
  CHECK(sab.hd == sba.hd);
  CHECK(sab.hd >= 0.0);
  CHECK(sab.hd <= 1.0);

  IrisCode none(8, 30, 1);
  CHECK(code_of([&] { iris::hamming(a, none, 3); }) == ErrorCode::EmptyJointMask);
  CHECK(code_of([&] { iris::hamming(a, IrisCode(8, 15, 1), 3); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("decide") {
  CHECK(iris::decide(0.0) == Decision::Pass);
  CHECK(iris::decide(0.30) == Decision::Pass);
  CHECK(iris::decide(std::nextafter(0.36, 0.0)) == Decision::Pass);
  CHECK(iris::decide(0.36) == Decision::Fail);
  CHECK(iris::decide(1.0) == Decision::Fail);
  CHECK(code_of([] { iris::decide(1.5); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { iris::decide(std::numeric_limits<double>::quiet_NaN()); }) == ErrorCode::OutOfRange);
}

TEST_CASE("code serialization") {
  std::mt19937_64 rng(8);
  const auto code = random_code(rng, 8, 30, 2, 0.6);
  const auto bytes = code.serialize();
  CHECK(bytes.size() == 8 + 12 + 2 * 120);
  CHECK(bytes[8] == 8);
  CHECK(bytes[12] == 30);
  CHECK(bytes[16] == 2);
  CHECK(IrisCode::deserialize(bytes) == code);
  auto broken = bytes;
  broken[0] = 'X';
  CHECK(code_of([&] { IrisCode::deserialize(broken); }) == ErrorCode::UnsupportedFormat);
  broken = bytes;
  broken.pop_back();
  CHECK(code_of([&] { IrisCode::deserialize(broken); }) == ErrorCode::UnsupportedFormat);

  testing::ScratchDir dir("code");
  iris::save_code(code, dir / "a.iriscode");
  CHECK(iris::is_code_file(dir / "a.iriscode"));
  CHECK(iris::load_code(dir / "a.iriscode") == code);
  imagekit::save_image(testing::synthetic_eye({}), dir / "eye.pgm");
  CHECK_FALSE(iris::is_code_file(dir / "eye.pgm"));
}

TEST_CASE("pipeline smoke on a bundled fixture") {
  const auto img = imagekit::load_image(std::filesystem::path(IRISCS_FIXTURE_DIR) / "eye1.pgm");
  IrisPipelineConfig cfg;
  const auto t = iris::enroll(img, cfg);
  const auto again = iris::enroll(img, cfg);
  CHECK(t.code == again.code);
  const auto hr = iris::hamming(t.code, again.code, cfg.max_shift);
  CHECK(hr.hd == 0.0);
  CHECK(iris::decide(hr.hd) == Decision::Pass);
  const auto json = iris::to_json(t.geometry);
  CHECK(json.find("\"pupil\"") != std::string::npos);
  const auto polar = iris::normalize(img, t.geometry, cfg.radial_res, cfg.angular_res);
  const auto picture = iris::polar_to_image(polar);
  CHECK(picture.height() == 16);
  CHECK(picture.width() == 240);
}
