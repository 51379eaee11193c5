#include "iriscs/imagekit.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "iriscs/error.hpp"

namespace fs = std::filesystem;

namespace iriscs {

Grid::Grid(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Grid::Grid(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorCode::DimensionMismatch, "grid data length " + std::to_string(data_.size()) +
                                                  " != " + std::to_string(rows) + "x" +
                                                  std::to_string(cols));
  }
}

GrayImage::GrayImage(Grid pixels) : pixels_(std::move(pixels)) {
  if (pixels_.rows() < kMinSide || pixels_.cols() < kMinSide) {
    throw Error(ErrorCode::ImageTooSmall, std::to_string(pixels_.rows()) + "x" +
                                              std::to_string(pixels_.cols()) + " is below 8x8");
  }
  for (double v : pixels_.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::OutOfRange, "non-finite intensity");
  }
}

GrayImage::GrayImage(std::size_t height, std::size_t width, std::vector<double> values)
    : GrayImage(Grid(height, width, std::move(values))) {}

namespace imagekit {
namespace {

constexpr std::array<unsigned char, 8> kPngSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

// Next header token of a PNM file, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  while (in) {
    int ch = in.peek();
    if (ch == '#') {
      std::string discard;
      std::getline(in, discard);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
  while (in) {
    int ch = in.peek();
    if (ch == EOF || std::isspace(ch) || ch == '#') break;
    tok.push_back(static_cast<char>(in.get()));
  }
  return tok;
}

std::size_t parse_dim(const std::string& tok, const fs::path& path) {
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(c); })) {
    throw Error(ErrorCode::UnsupportedFormat, "malformed PGM header in " + path.string());
  }
  return std::stoul(tok);
}

GrayImage load_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  if (pnm_token(in) != "P5") throw Error(ErrorCode::UnsupportedFormat, "not a P5 PGM: " + path.string());
  const std::size_t width = parse_dim(pnm_token(in), path);
  const std::size_t height = parse_dim(pnm_token(in), path);
  const std::size_t maxval = parse_dim(pnm_token(in), path);
  if (maxval == 0 || maxval > 255) {
    throw Error(ErrorCode::UnsupportedFormat, "only 8-bit PGM is supported (maxval " +
                                                  std::to_string(maxval) + ")");
  }
  if (!std::isspace(in.get())) throw Error(ErrorCode::UnsupportedFormat, "malformed PGM header");
  if (height < GrayImage::kMinSide || width < GrayImage::kMinSide) {
    throw Error(ErrorCode::ImageTooSmall, path.string() + " is " + std::to_string(height) + "x" +
                                              std::to_string(width));
  }
  std::vector<unsigned char> bytes(height * width);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
    throw Error(ErrorCode::UnsupportedFormat, "truncated PGM raster in " + path.string());
  }
  return GrayImage(height, width, std::vector<double>(bytes.begin(), bytes.end()));
}

GrayImage load_png(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": " + image.message);
  }
  const auto reject = [&](const std::string& why) {
    png_image_free(&image);
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": " + why);
  };
  if (image.format & PNG_FORMAT_FLAG_COLOR) reject("color PNG is not supported");
  if (image.format & PNG_FORMAT_FLAG_LINEAR) reject("16-bit PNG is not supported");
  if (image.format & PNG_FORMAT_FLAG_ALPHA) reject("PNG with alpha is not supported");
  if (image.height < GrayImage::kMinSide || image.width < GrayImage::kMinSide) {
    png_image_free(&image);
    throw Error(ErrorCode::ImageTooSmall, path.string());
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": " + image.message);
  }
  return GrayImage(image.height, image.width, std::vector<double>(buffer.begin(), buffer.end()));
}

}  // namespace

GrayImage load_image(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorCode::FileNotFound, path.string());
  std::array<unsigned char, 8> head{};
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    in.read(reinterpret_cast<char*>(head.data()), head.size());
    if (in.gcount() < 2) throw Error(ErrorCode::UnsupportedFormat, "empty or tiny file " + path.string());
  }
  if (head == kPngSignature) return load_png(path);
  if (head[0] == 'P' && head[1] == '5') return load_pgm(path);
  throw Error(ErrorCode::UnsupportedFormat, "unrecognized image signature in " + path.string());
}

GrayImage quantize(const GrayImage& img) {
  std::vector<double> out(img.values().begin(), img.values().end());
  for (double& v : out) v = to_byte(v);
  return GrayImage(img.height(), img.width(), std::move(out));
}

void save_image(const GrayImage& img, const fs::path& path) {
  std::vector<std::uint8_t> bytes(img.values().size());
  std::transform(img.values().begin(), img.values().end(), bytes.begin(), to_byte);

  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr)) {
      throw Error(ErrorCode::IoError, path.string() + ": " + image.message);
    }
    return;
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

double mean_squared_error(const Grid& a, const Grid& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::DimensionMismatch, "MSE of differently sized grids");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

double psnr(const GrayImage& reference, const GrayImage& test) {
  if (reference.height() != test.height() || reference.width() != test.width()) {
    throw Error(ErrorCode::DimensionMismatch, "PSNR of differently sized images");
  }
  const double mse = mean_squared_error(reference, test);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ManifestError, "cannot open manifest " + path.string());
  DatasetManifest manifest;
  manifest.root = path.parent_path();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (tab == std::string::npos) throw Error(ErrorCode::ManifestError, where + ": expected path<TAB>label");
    std::string rel = line.substr(0, tab);
    std::string label = line.substr(tab + 1);
    if (rel.empty() || label.empty()) throw Error(ErrorCode::ManifestError, where + ": empty path or label");
    fs::path resolved = fs::path(rel).is_absolute() ? fs::path(rel) : manifest.root / rel;
    std::error_code ec;
    if (!fs::is_regular_file(resolved, ec)) {
      throw Error(ErrorCode::ManifestError, where + ": not a readable file: " + resolved.string());
    }
    manifest.entries.push_back({std::move(resolved), std::move(label)});
  }
  if (manifest.entries.empty()) throw Error(ErrorCode::ManifestError, path.string() + " lists no images");
  return manifest;
}

}  // namespace imagekit
}  // namespace iriscs
