#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "iriscs/imagekit.hpp"

namespace iriscs::testing {

struct Circle {
  double x = 64.0;
  double y = 64.0;
  double r = 20.0;
};

/// Flat three-zone eye: dark pupil disk, iris annulus, bright sclera. Edges are
/// anti-aliased by 4x4 supersampling.
struct EyeSpec {
  std::size_t rows = 128;
  std::size_t cols = 128;
  Circle pupil{64.0, 64.0, 20.0};
  Circle iris{64.0, 64.0, 50.0};
  double pupil_level = 10.0;
  double iris_level = 100.0;
  double sclera_level = 220.0;
  double offset = 0.0;  // added everywhere
};

GrayImage synthetic_eye(const EyeSpec& spec);

/// Iris-like fixture: the flat eye plus a seeded texture of angular/radial
/// harmonics and dark crypts inside the iris, a soft sclera shading gradient
/// and mild pixel noise.
struct TexturedEyeSpec {
  EyeSpec eye;
  std::uint64_t seed = 1;
  double texture_amplitude = 28.0;
  std::size_t harmonics = 10;
  std::size_t crypts = 30;
  double crypt_size = 1.2;
  double min_angular = 10.0;
  double max_angular = 40.0;
  double max_radial = 5.0;
  double noise = 4.0;
};

GrayImage textured_eye(const TexturedEyeSpec& spec);

/// Grid of i.i.d. uniform values in [lo, hi).
Grid random_grid(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo = 0.0, double hi = 255.0);

/// Rotates about (cx, cy) by `radians` with bilinear resampling; points that
/// map outside the source take `fill`.
Grid rotate(const Grid& img, double cx, double cy, double radians, double fill);

}  // namespace iriscs::testing
