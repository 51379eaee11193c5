#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iriscs/imagekit.hpp"
#include "iriscs/iris.hpp"
#include "iriscs/recon.hpp"
#include "iriscs/transforms.hpp"

namespace iriscs {

struct ExperimentConfig {
  std::filesystem::path manifest;
  std::vector<double> fractions = {0.10, 0.20, 0.30, 0.40};
  std::vector<TransformDomain> domains = {TransformDomain::DCT, TransformDomain::DFT};
  SolverConfig solver;  // `domain` is overridden per cell
  IrisPipelineConfig iris;
  std::uint64_t base_seed = 20190101;
  std::filesystem::path output_dir = "results";
  std::size_t workers = 1;

  void validate() const;
};

struct CellRecord {
  std::string label;
  TransformDomain domain = TransformDomain::DCT;
  double fraction = 0.0;
  std::uint64_t cell_seed = 0;
  double psnr_db = 0.0;
  std::optional<double> hd;  // empty when the probe could not be localized or matched
  int best_shift = 0;
  Decision decision = Decision::Fail;
  std::string reason;  // why a FAIL happened without a usable hd
  std::size_t iterations = 0;
  bool converged = false;
  std::optional<GrayImage> reconstruction;  // quantized probe image; not serialized
};

struct SkippedImage {
  std::string label;
  std::string reason;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CellRecord> records;  // sorted by (label, domain, fraction)
  std::vector<SkippedImage> skipped;

  /// Fractions in ascending order, the column order of every table.
  std::vector<double> sorted_fractions() const;
  /// Mean PSNR over images, [domain index][fraction index] in config.domains order.
  std::vector<std::vector<double>> psnr_matrix() const;
  /// PASS when every image passed that cell.
  std::vector<std::vector<Decision>> decision_matrix() const;
};

namespace harness {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// h = mix64(base_seed); h = mix64(h ^ byte) for each label byte;
/// h = mix64(h ^ domain_id) with DCT = 0, DFT = 1;
/// h = mix64(h ^ llround(fraction * 1000)).
std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& label, TransformDomain domain, double fraction);

/// INI sections [experiment], [solver], [iris]. Relative paths resolve
/// against the config file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);

struct PipelineConfig {
  SolverConfig solver;
  IrisPipelineConfig iris;
};

/// Reads only the [solver] and [iris] sections of a config file; used by the
/// single-image CLI subcommands.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Applies the [iris] keys of an INI file on top of `base`.
IrisPipelineConfig iris_config_from(const std::map<std::string, std::string>& entries, IrisPipelineConfig base = {});

/// Enrolls each original image, then reconstructs and matches every
/// (domain, fraction) cell. Images whose original fails enrollment are
/// listed in `skipped` instead of aborting the run.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Writes psnr.csv, decisions.csv, hd_curve.csv, report.json and recon/<label>/<domain>_<fraction>.png.
void emit_tables(const ExperimentReport& report, const std::filesystem::path& dir);

std::string report_json(const ExperimentReport& report);
std::string psnr_csv(const ExperimentReport& report);
std::string decisions_csv(const ExperimentReport& report);
std::string hd_curve_csv(const ExperimentReport& report);

}  // namespace harness

/// Subcommands: run, recon, match, localize. Returns 0 on success, 1 on a
/// usage error, 2 on a data error.
int cli_main(int argc, char** argv);

}  // namespace iriscs
