#include "iriscs/iris.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <optional>

#include "iriscs/error.hpp"
#include "json_io.hpp"

namespace iriscs {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::array<std::uint8_t, 8> kCodeMagic = {'I', 'R', 'I', 'S', 'C', 'O', 'D', 'E'};
constexpr std::size_t kMinContourSamples = 8;

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

bool excluded(const std::vector<AngularInterval>& arcs, double theta) {
  return std::any_of(arcs.begin(), arcs.end(), [&](const AngularInterval& a) { return a.contains(theta); });
}

// Bilinear sample at column x, row y. Empty outside [0, cols-1] x [0, rows-1].
std::optional<double> bilinear(const Grid& img, double x, double y) {
  const double max_x = static_cast<double>(img.cols() - 1);
  const double max_y = static_cast<double>(img.rows() - 1);
  if (!(x >= 0.0 && y >= 0.0 && x <= max_x && y <= max_y)) return std::nullopt;
  const auto x0 = static_cast<std::size_t>(std::floor(x));
  const auto y0 = static_cast<std::size_t>(std::floor(y));
  const std::size_t x1 = std::min(x0 + 1, img.cols() - 1);
  const std::size_t y1 = std::min(y0 + 1, img.rows() - 1);
  const double fx = x - static_cast<double>(x0);
  const double fy = y - static_cast<double>(y0);
  const double top = img(y0, x0) * (1.0 - fx) + img(y0, x1) * fx;
  const double bottom = img(y1, x0) * (1.0 - fx) + img(y1, x1) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

// Unit circle directions shared by every contour of one localization pass;
// `usable` is false inside exclusion arcs.
struct ContourTable {
  std::vector<double> cos_t;
  std::vector<double> sin_t;
  std::vector<std::uint8_t> usable;

  explicit ContourTable(const LocalizerConfig& cfg) {
    const std::size_t n = cfg.angular_samples;
    cos_t.resize(n);
    sin_t.resize(n);
    usable.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double theta = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
      cos_t[k] = std::cos(theta);
      sin_t[k] = std::sin(theta);
      usable[k] = excluded(cfg.exclusion_arcs, theta) ? 0 : 1;
    }
  }

  std::optional<double> mean(const Grid& img, double cx, double cy, double radius) const {
    const double rho = std::max(radius, 0.0);
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < cos_t.size(); ++k) {
      if (!usable[k]) continue;
      if (auto v = bilinear(img, cx + rho * cos_t[k], cy + rho * sin_t[k])) {
        acc += *v;
        ++count;
      }
    }
    if (count < kMinContourSamples) return std::nullopt;
    return acc / static_cast<double>(count);
  }

  double in_frame_fraction(const Grid& img, double cx, double cy, double radius) const {
    std::size_t inside = 0;
    for (std::size_t k = 0; k < cos_t.size(); ++k) {
      if (bilinear(img, cx + radius * cos_t[k], cy + radius * sin_t[k])) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(cos_t.size());
  }
};

// Normalized Gaussian over offsets -half..half.
std::vector<double> gaussian_kernel(double sigma, int& half) {
  half = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * half + 1));
  double total = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + half)] = v;
    total += v;
  }
  for (double& v : k) v /= total;
  return k;
}

// Smoothed radial-derivative responses for radii r_lo..r_hi about one center.
// Radii whose stencil touches a degenerate contour are empty.
class RadialProfile {
 public:
  RadialProfile(const Grid& img, const ContourTable& table, double cx, double cy, int r_lo, int r_hi,
                const std::vector<double>& kernel, int half)
      : r_lo_(r_lo) {
    const int first = r_lo - half - 1;
    const int last = r_hi + half + 1;
    std::vector<std::optional<double>> means;
    means.reserve(static_cast<std::size_t>(last - first + 1));
    for (int rho = first; rho <= last; ++rho) means.push_back(table.mean(img, cx, cy, rho));
    const auto mean_at = [&](int rho) { return means[static_cast<std::size_t>(rho - first)]; };

    responses_.reserve(static_cast<std::size_t>(r_hi - r_lo + 1));
    for (int r = r_lo; r <= r_hi; ++r) {
      double acc = 0.0;
      bool ok = true;
      for (int k = -half; k <= half && ok; ++k) {
        const auto lo = mean_at(r + k - 1);
        const auto hi = mean_at(r + k + 1);
        if (!lo || !hi) {
          ok = false;
          break;
        }
        acc += kernel[static_cast<std::size_t>(k + half)] * 0.5 * (*hi - *lo);
      }
      responses_.push_back(ok ? std::optional<double>(std::abs(acc)) : std::nullopt);
    }
  }

  std::optional<double> at(int r) const { return responses_[static_cast<std::size_t>(r - r_lo_)]; }

 private:
  int r_lo_;
  std::vector<std::optional<double>> responses_;
};

struct Candidate {
  double response = -1.0;
  int x = 0;
  int y = 0;
  int r = 0;
  bool found = false;
};

// Replaces `best` when `c` wins: larger response, then smaller radius, then
// earlier row-major center.
void consider(Candidate& best, const Candidate& c) {
  if (!best.found) {
    best = c;
    return;
  }
  if (c.response != best.response) {
    if (c.response > best.response) best = c;
    return;
  }
  if (c.r != best.r) {
    if (c.r < best.r) best = c;
    return;
  }
  if (c.y != best.y ? c.y < best.y : c.x < best.x) best = c;
}

template <typename Accept>
void search_centers(const Grid& img, const ContourTable& table, const std::vector<double>& kernel, int half,
                    const std::vector<std::pair<int, int>>& centers, int r_lo, int r_hi, Accept&& accept,
                    Candidate& best) {
  for (const auto& [x, y] : centers) {
    const RadialProfile profile(img, table, x, y, r_lo, r_hi, kernel, half);
    for (int r = r_lo; r <= r_hi; ++r) {
      if (!accept(x, y, r)) continue;
      if (auto resp = profile.at(r)) consider(best, {*resp, x, y, r, true});
    }
  }
}

std::vector<std::pair<int, int>> lattice(int x_lo, int x_hi, int y_lo, int y_hi, int x_origin, int y_origin,
                                         int stride) {
  const auto first_on_lattice = [stride](int lo, int origin) {
    int d = (lo - origin) % stride;
    if (d < 0) d += stride;
    return d == 0 ? lo : lo + (stride - d);
  };
  std::vector<std::pair<int, int>> out;
  for (int y = first_on_lattice(y_lo, y_origin); y <= y_hi; y += stride) {
    for (int x = first_on_lattice(x_lo, x_origin); x <= x_hi; x += stride) out.emplace_back(x, y);
  }
  return out;
}

std::vector<std::pair<int, int>> neighborhood(const Candidate& c, int reach, int cols, int rows) {
  return lattice(std::max(0, c.x - reach), std::min(cols - 1, c.x + reach), std::max(0, c.y - reach),
                 std::min(rows - 1, c.y + reach), 0, 0, 1);
}

}  // namespace

bool AngularInterval::contains(double theta) const noexcept {
  const double t = wrap_angle(theta);
  const double b = wrap_angle(begin);
  const double e = wrap_angle(end);
  if (b == e) return false;
  return b < e ? (t >= b && t < e) : (t >= b || t < e);
}

std::vector<AngularInterval> default_exclusion_arcs() {
  using std::numbers::pi;
  return {{pi / 4.0, 3.0 * pi / 4.0}, {5.0 * pi / 4.0, 7.0 * pi / 4.0}};
}

void LocalizerConfig::validate(std::size_t rows, std::size_t cols) const {
  const double limit = static_cast<double>(std::min(rows, cols)) / 2.0;
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, "localizer: " + what); };
  if (!(pupil_r_min > 0 && pupil_r_min < pupil_r_max && pupil_r_max < limit)) fail("pupil radius range out of bounds");
  if (!(iris_r_min > 0 && iris_r_min < iris_r_max && iris_r_max < limit)) fail("iris radius range out of bounds");
  if (center_stride < 1) fail("center_stride must be >= 1");
  if (!(sigma > 0.0)) fail("sigma must be > 0");
  if (angular_samples < 64) fail("angular_samples must be >= 64");
  if (!(iris_center_tolerance >= 0.0)) fail("iris_center_tolerance must be >= 0");
}

GaborBank GaborBank::defaults(std::size_t radial_res, std::size_t angular_res) {
  GaborBank bank;
  bank.beta = kTwoPi * 8.0 / static_cast<double>(angular_res);
  bank.alpha = static_cast<double>(radial_res) / 3.0;
  bank.wavelengths = {kTwoPi / (2.0 * bank.beta)};
  bank.radial_sites = 8;
  bank.angular_sites = 30;
  return bank;
}

IrisCode::IrisCode(std::size_t radial_sites, std::size_t angular_sites, std::size_t wavelengths)
    : radial_sites_(radial_sites),
      angular_sites_(angular_sites),
      wavelengths_(wavelengths),
      size_(radial_sites * angular_sites * wavelengths * 2),
      bits_((size_ + 63) / 64, 0),
      mask_((size_ + 63) / 64, 0) {}

std::size_t IrisCode::valid_count() const noexcept {
  std::size_t n = 0;
  for (auto w : mask_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<std::uint8_t> IrisCode::serialize() const {
  std::vector<std::uint8_t> out(kCodeMagic.begin(), kCodeMagic.end());
  for (std::size_t dim : {radial_sites_, angular_sites_, wavelengths_}) {
    const auto v = static_cast<std::uint32_t>(dim);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  const std::size_t nbytes = (size_ + 7) / 8;
  for (const auto* words : {&bits_, &mask_}) {
    for (std::size_t i = 0; i < nbytes; ++i) {
      out.push_back(static_cast<std::uint8_t>((*words)[i / 8] >> (8 * (i % 8))));
    }
  }
  return out;
}

IrisCode IrisCode::deserialize(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kHeader = 8 + 12;
  if (bytes.size() < kHeader || !std::equal(kCodeMagic.begin(), kCodeMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::UnsupportedFormat, "not a serialized iris code");
  }
  std::array<std::uint32_t, 3> dims{};
  for (std::size_t d = 0; d < 3; ++d) {
    for (std::size_t b = 0; b < 4; ++b) dims[d] |= static_cast<std::uint32_t>(bytes[8 + 4 * d + b]) << (8 * b);
  }
  IrisCode code(dims[0], dims[1], dims[2]);
  const std::size_t nbytes = (code.size_ + 7) / 8;
  if (bytes.size() != kHeader + 2 * nbytes) throw Error(ErrorCode::UnsupportedFormat, "iris code length mismatch");
  for (std::size_t i = 0; i < code.size_; ++i) {
    code.set_bit(i, (bytes[kHeader + i / 8] >> (i % 8)) & 1u);
    code.set_mask(i, (bytes[kHeader + nbytes + i / 8] >> (i % 8)) & 1u);
  }
  return code;
}

std::string_view to_string(Decision d) noexcept { return d == Decision::Pass ? "PASS" : "FAIL"; }

namespace iris {

double integrodiff_response(const Grid& img, double cx, double cy, int r, const LocalizerConfig& cfg) {
  if (!(cfg.sigma > 0.0) || cfg.angular_samples == 0) throw Error(ErrorCode::InvalidConfig, "bad localizer config");
  const ContourTable table(cfg);
  int half = 0;
  const auto kernel = gaussian_kernel(cfg.sigma, half);
  const RadialProfile profile(img, table, cx, cy, r, r, kernel, half);
  auto resp = profile.at(r);
  if (!resp) {
    throw Error(ErrorCode::DegenerateContour, "fewer than 8 usable contour samples near r=" + std::to_string(r));
  }
  return *resp;
}

IrisGeometry localize(const Grid& img, const LocalizerConfig& cfg) {
  cfg.validate(img.rows(), img.cols());
  const int rows = static_cast<int>(img.rows());
  const int cols = static_cast<int>(img.cols());
  const ContourTable table(cfg);
  int half = 0;
  const auto kernel = gaussian_kernel(cfg.sigma, half);

  // The pupil stencil (radius r + half + 1) must lie fully inside the frame:
  // partial contours change their sample set with the radius, which reads as
  // a spurious radial derivative.
  const auto pupil_in_frame = [&](int x, int y, int r) {
    const int reach = r + half + 1;
    return x - reach >= 0 && y - reach >= 0 && x + reach <= cols - 1 && y + reach <= rows - 1;
  };
  Candidate pupil;
  search_centers(img, table, kernel, half, lattice(0, cols - 1, 0, rows - 1, 0, 0, cfg.center_stride),
                 cfg.pupil_r_min, cfg.pupil_r_max, pupil_in_frame, pupil);
  if (pupil.found && cfg.center_stride > 1) {
    search_centers(img, table, kernel, half, neighborhood(pupil, cfg.center_stride - 1, cols, rows),
                   cfg.pupil_r_min, cfg.pupil_r_max, pupil_in_frame, pupil);
  }
  if (!pupil.found || pupil.response < cfg.floor_response) {
    throw Error(ErrorCode::LocalizationFailed, "no pupil boundary above the response floor");
  }

  const double tol = cfg.iris_center_tolerance;
  const auto around_pupil = [&](int x, int y, int r) {
    const double dx = x - pupil.x, dy = y - pupil.y;
    const double offset = std::hypot(dx, dy);
    return offset <= tol && offset + pupil.r < r;
  };
  const int reach = static_cast<int>(std::floor(tol));
  Candidate outer;
  search_centers(img, table, kernel, half,
                 lattice(std::max(0, pupil.x - reach), std::min(cols - 1, pupil.x + reach),
                         std::max(0, pupil.y - reach), std::min(rows - 1, pupil.y + reach), pupil.x, pupil.y,
                         cfg.center_stride),
                 cfg.iris_r_min, cfg.iris_r_max, around_pupil, outer);
  if (outer.found && cfg.center_stride > 1) {
    search_centers(img, table, kernel, half, neighborhood(outer, cfg.center_stride - 1, cols, rows),
                   cfg.iris_r_min, cfg.iris_r_max, around_pupil, outer);
  }
  if (!outer.found || outer.response < cfg.floor_response) {
    throw Error(ErrorCode::LocalizationFailed, "no iris boundary above the response floor");
  }

  IrisGeometry geo;
  geo.pupil_x = pupil.x;
  geo.pupil_y = pupil.y;
  geo.pupil_r = pupil.r;
  geo.iris_x = outer.x;
  geo.iris_y = outer.y;
  geo.iris_r = outer.r;
  geo.exclusion_arcs = cfg.exclusion_arcs;
  geo.visible_fraction = table.in_frame_fraction(img, outer.x, outer.y, outer.r);
  if (geo.visible_fraction < cfg.min_visible_fraction) {
    throw Error(ErrorCode::VisibilityRejected, "only " + std::to_string(geo.visible_fraction * 100.0) +
                                                   "% of the iris boundary is inside the image");
  }
  return geo;
}

PolarIris normalize(const Grid& img, const IrisGeometry& geo, std::size_t radial_res, std::size_t angular_res) {
  if (radial_res == 0 || angular_res == 0) throw Error(ErrorCode::InvalidConfig, "empty polar resolution");
  if (!(geo.pupil_r > 0.0 && geo.iris_r > geo.pupil_r + std::hypot(geo.iris_x - geo.pupil_x, geo.iris_y - geo.pupil_y))) {
    throw Error(ErrorCode::InvalidConfig, "pupil circle is not strictly inside the iris circle");
  }
  PolarIris polar{radial_res, angular_res, Grid(radial_res, angular_res), std::vector<std::uint8_t>(radial_res * angular_res, 0)};
  for (std::size_t j = 0; j < angular_res; ++j) {
    const double theta = kTwoPi * static_cast<double>(j) / static_cast<double>(angular_res);
    const double c = std::cos(theta), s = std::sin(theta);
    const double px = geo.pupil_x + geo.pupil_r * c, py = geo.pupil_y + geo.pupil_r * s;
    const double qx = geo.iris_x + geo.iris_r * c, qy = geo.iris_y + geo.iris_r * s;
    const bool occluded = excluded(geo.exclusion_arcs, theta);
    for (std::size_t i = 0; i < radial_res; ++i) {
      const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(radial_res);
      const auto v = bilinear(img, (1.0 - t) * px + t * qx, (1.0 - t) * py + t * qy);
      polar.samples(i, j) = v.value_or(0.0);
      polar.validity[i * angular_res + j] = (v && !occluded) ? 1 : 0;
    }
  }
  return polar;
}

IrisCode encode(const PolarIris& polar, const GaborBank& bank) {
  const std::size_t rr = polar.radial_res, ar = polar.angular_res;
  if (polar.samples.rows() != rr || polar.samples.cols() != ar || polar.validity.size() != rr * ar) {
    throw Error(ErrorCode::LatticeMismatch, "polar grid does not match its declared resolution");
  }
  if (bank.radial_sites == 0 || bank.angular_sites == 0 || bank.radial_sites > rr || bank.angular_sites > ar ||
      ar % bank.angular_sites != 0) {
    throw Error(ErrorCode::LatticeMismatch, "Gabor lattice does not tile the polar grid");
  }
  if (bank.wavelengths.empty() || !(bank.alpha > 0.0) || !(bank.beta > 0.0)) {
    throw Error(ErrorCode::LatticeMismatch, "Gabor bank needs positive widths and at least one wavelength");
  }

  // The filter support is the window where each envelope factor is >= e^-2.
  const double radial_reach = std::sqrt(2.0) * bank.alpha;
  const double angular_reach = std::sqrt(2.0) * bank.beta;
  const double col_step = kTwoPi / static_cast<double>(ar);
  const int max_offset = std::min(static_cast<int>(std::floor(angular_reach / col_step + 1e-9)),
                                  static_cast<int>((ar - 1) / 2));
  const std::size_t col_spacing = ar / bank.angular_sites;
  const std::size_t nw = bank.wavelengths.size();

  IrisCode code(bank.radial_sites, bank.angular_sites, nw);
  for (std::size_t ri = 0; ri < bank.radial_sites; ++ri) {
    const double r0 = (static_cast<double>(ri) + 0.5) * static_cast<double>(rr) / static_cast<double>(bank.radial_sites) - 0.5;
    const auto m_lo = static_cast<std::size_t>(std::max(0.0, std::ceil(r0 - radial_reach - 1e-9)));
    const auto m_hi = static_cast<std::size_t>(std::min(static_cast<double>(rr - 1), std::floor(r0 + radial_reach + 1e-9)));

    // Envelope weights (area element mu included) are the same at every angular site.
    std::vector<double> weight;
    std::vector<int> offsets;
    std::vector<std::size_t> rows_of;
    for (std::size_t m = m_lo; m <= m_hi; ++m) {
      const double mu = (static_cast<double>(m) + 0.5) / static_cast<double>(rr);
      const double dr = r0 - static_cast<double>(m);
      for (int d = -max_offset; d <= max_offset; ++d) {
        const double dtheta = -static_cast<double>(d) * col_step;  // theta0 - phi
        weight.push_back(mu * std::exp(-(dr * dr) / (bank.alpha * bank.alpha)) *
                         std::exp(-(dtheta * dtheta) / (bank.beta * bank.beta)));
        offsets.push_back(d);
        rows_of.push_back(m);
      }
    }
    double weight_sum = 0.0;
    for (double w : weight) weight_sum += w;
    const double zero_tol = 1e-9 * weight_sum;

    for (std::size_t ai = 0; ai < bank.angular_sites; ++ai) {
      const std::size_t col0 = ai * col_spacing;
      const auto col_at = [&](int d) {
        return static_cast<std::size_t>((static_cast<long>(col0) + d + static_cast<long>(ar)) % static_cast<long>(ar));
      };
      double mean = 0.0;
      bool support_valid = true;
      for (std::size_t t = 0; t < weight.size(); ++t) {
        const std::size_t c = col_at(offsets[t]);
        mean += weight[t] * polar.samples(rows_of[t], c);
        support_valid = support_valid && polar.valid(rows_of[t], c);
      }
      mean /= weight_sum;

      for (std::size_t w = 0; w < nw; ++w) {
        const double omega = bank.wavelengths[w];
        double re = 0.0, im = 0.0;
        for (std::size_t t = 0; t < weight.size(); ++t) {
          const double dtheta = -static_cast<double>(offsets[t]) * col_step;
          const double v = weight[t] * (polar.samples(rows_of[t], col_at(offsets[t])) - mean);
          // e^{-i omega (theta0 - phi)}
          re += v * std::cos(omega * dtheta);
          im -= v * std::sin(omega * dtheta);
        }
        const std::size_t base = ((ri * bank.angular_sites + ai) * nw + w) * 2;
        code.set_bit(base, re >= 0.0);
        code.set_bit(base + 1, im >= 0.0);
        code.set_mask(base, support_valid && std::abs(re) > zero_tol);
        code.set_mask(base + 1, support_valid && std::abs(im) > zero_tol);
      }
    }
  }
  return code;
}

namespace {

// Copy of `code` whose angular column j holds the original column (j + shift) mod A.
IrisCode rotate_columns(const IrisCode& code, int shift) {
  const std::size_t a = code.angular_sites();
  const std::size_t per_site = code.bits_per_site();
  const long s = ((shift % static_cast<long>(a)) + static_cast<long>(a)) % static_cast<long>(a);
  IrisCode out(code.radial_sites(), a, code.wavelengths());
  for (std::size_t r = 0; r < code.radial_sites(); ++r) {
    for (std::size_t j = 0; j < a; ++j) {
      const std::size_t src_col = (j + static_cast<std::size_t>(s)) % a;
      const std::size_t dst = (r * a + j) * per_site;
      const std::size_t src = (r * a + src_col) * per_site;
      for (std::size_t k = 0; k < per_site; ++k) {
        out.set_bit(dst + k, code.bit(src + k));
        out.set_mask(dst + k, code.mask(src + k));
      }
    }
  }
  return out;
}

}  // namespace

HammingResult hamming(const IrisCode& a, const IrisCode& b, int max_shift) {
  if (a.radial_sites() != b.radial_sites() || a.angular_sites() != b.angular_sites() ||
      a.wavelengths() != b.wavelengths()) {
    throw Error(ErrorCode::DimensionMismatch, "iris codes have different layouts");
  }
  if (max_shift < 0) throw Error(ErrorCode::InvalidConfig, "max_shift must be >= 0");

  std::optional<HammingResult> best;
  const auto try_shift = [&](int s) {
    const IrisCode rotated = rotate_columns(b, s);
    const auto ab = a.bit_words(), am = a.mask_words();
    const auto bb = rotated.bit_words(), bm = rotated.mask_words();
    std::size_t diff = 0, joint = 0;
    for (std::size_t w = 0; w < ab.size(); ++w) {
      const std::uint64_t valid = am[w] & bm[w];
      joint += static_cast<std::size_t>(std::popcount(valid));
      diff += static_cast<std::size_t>(std::popcount((ab[w] ^ bb[w]) & valid));
    }
    if (joint == 0) return;
    // Exact comparison of diff/joint ratios; candidates arrive in tie-break order.
    if (!best || diff * best->compared < best->disagreeing * joint) {
      best = HammingResult{static_cast<double>(diff) / static_cast<double>(joint), s, diff, joint};
    }
  };
  try_shift(0);
  for (int s = 1; s <= max_shift; ++s) {
    try_shift(-s);
    try_shift(s);
  }
  if (!best) throw Error(ErrorCode::EmptyJointMask, "no jointly valid bits at any tested shift");
  return *best;
}

Decision decide(double hd) {
  if (!(hd >= 0.0 && hd <= 1.0)) throw Error(ErrorCode::OutOfRange, "hamming distance outside [0, 1]");
  return hd < kMatchThreshold ? Decision::Pass : Decision::Fail;
}

Template enroll(const Grid& img, const IrisPipelineConfig& cfg) {
  IrisGeometry geo = localize(img, cfg.localizer);
  const PolarIris polar = normalize(img, geo, cfg.radial_res, cfg.angular_res);
  return {std::move(geo), encode(polar, cfg.bank)};
}

std::string to_json(const IrisGeometry& geo) {
  nlohmann::json j = geo;
  return j.dump(2);
}

void save_code(const IrisCode& code, const std::filesystem::path& path) {
  const auto bytes = code.serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

IrisCode load_code(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return IrisCode::deserialize(bytes);
}

bool is_code_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::array<std::uint8_t, 8> head{};
  in.read(reinterpret_cast<char*>(head.data()), head.size());
  return in.gcount() == static_cast<std::streamsize>(head.size()) && head == kCodeMagic;
}

GrayImage polar_to_image(const PolarIris& polar) {
  Grid img(polar.radial_res, polar.angular_res);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = polar.validity[i] ? polar.samples[i] : 0.0;
  return GrayImage(std::move(img));
}

}  // namespace iris

void to_json(nlohmann::json& j, const IrisGeometry& geo) {
  nlohmann::json arcs = nlohmann::json::array();
  for (const auto& a : geo.exclusion_arcs) arcs.push_back({a.begin, a.end});
  j = nlohmann::json{{"pupil", {{"x", geo.pupil_x}, {"y", geo.pupil_y}, {"r", geo.pupil_r}}},
                     {"iris", {{"x", geo.iris_x}, {"y", geo.iris_y}, {"r", geo.iris_r}}},
                     {"visible_fraction", geo.visible_fraction},
                     {"exclusion_arcs", std::move(arcs)}};
}

void to_json(nlohmann::json& j, const LocalizerConfig& cfg) {
  nlohmann::json arcs = nlohmann::json::array();
  for (const auto& a : cfg.exclusion_arcs) arcs.push_back({a.begin, a.end});
  j = nlohmann::json{{"pupil_r_min", cfg.pupil_r_min},
                     {"pupil_r_max", cfg.pupil_r_max},
                     {"iris_r_min", cfg.iris_r_min},
                     {"iris_r_max", cfg.iris_r_max},
                     {"center_stride", cfg.center_stride},
                     {"sigma", cfg.sigma},
                     {"angular_samples", cfg.angular_samples},
                     {"exclusion_arcs", std::move(arcs)},
                     {"floor_response", cfg.floor_response},
                     {"iris_center_tolerance", cfg.iris_center_tolerance},
                     {"min_visible_fraction", cfg.min_visible_fraction}};
}

void to_json(nlohmann::json& j, const GaborBank& bank) {
  j = nlohmann::json{{"wavelengths", bank.wavelengths},
                     {"alpha", bank.alpha},
                     {"beta", bank.beta},
                     {"radial_sites", bank.radial_sites},
                     {"angular_sites", bank.angular_sites}};
}

void to_json(nlohmann::json& j, const IrisPipelineConfig& cfg) {
  j = nlohmann::json{{"localizer", cfg.localizer},
                     {"radial_res", cfg.radial_res},
                     {"angular_res", cfg.angular_res},
                     {"gabor", cfg.bank},
                     {"max_shift", cfg.max_shift}};
}

}  // namespace iriscs
