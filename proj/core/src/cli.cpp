#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "iriscs/error.hpp"
#include "iriscs/harness.hpp"
#include "iriscs/imagekit.hpp"
#include "iriscs/iris.hpp"
#include "iriscs/recon.hpp"
#include "iriscs/sampling.hpp"

namespace fs = std::filesystem;

namespace iriscs {
namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

harness::PipelineConfig pipeline_from(const std::string& config_path) {
  if (config_path.empty()) return {};
  return harness::load_pipeline_config(config_path);
}

Template template_for(const fs::path& path, const IrisPipelineConfig& cfg) {
  if (iris::is_code_file(path)) return {IrisGeometry{}, iris::load_code(path)};
  return iris::enroll(imagekit::load_image(path), cfg);
}

int cmd_run(const std::string& config_path, std::size_t workers, const std::string& out_dir) {
  ExperimentConfig cfg = harness::load_config(config_path);
  if (workers > 0) cfg.workers = workers;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  const ExperimentReport report = harness::run_experiment(cfg);
  harness::emit_tables(report, cfg.output_dir);
  std::cout << harness::psnr_csv(report) << '\n' << harness::decisions_csv(report);
  for (const auto& s : report.skipped) std::cerr << "skipped " << s.label << ": " << s.reason << '\n';
  std::cout << "wrote " << cfg.output_dir.string() << '\n';
  return 0;
}

struct ReconArgs {
  std::string image, domain = "dct", mode = "tv_domain", out, config, report;
  double fraction = 0.3;
  std::uint64_t seed = 1;
};

int cmd_recon(const ReconArgs& args) {
  SolverConfig solver = pipeline_from(args.config).solver;
  solver.domain = parse_domain(args.domain);
  solver.mode = parse_mode(args.mode);
  const GrayImage original = imagekit::load_image(args.image);
  const SampleMask mask = sampling::generate_mask(original.height(), original.width(), args.fraction, args.seed);
  const ReconResult result = recon::reconstruct(sampling::measure(original, mask), mask, solver);
  imagekit::save_image(result.image, args.out);
  const double db = imagekit::psnr(original, imagekit::quantize(result.image));
  std::printf("psnr_db=%.4f iterations=%zu converged=%s\n", db, result.report.iterations,
              result.report.converged ? "true" : "false");
  if (!args.report.empty()) {
    std::ofstream(args.report) << recon::to_json(result.report) << '\n';
  }
  return 0;
}

int cmd_match(const std::string& probe, const std::string& gallery, const std::string& config,
              std::optional<int> max_shift) {
  const IrisPipelineConfig cfg = pipeline_from(config).iris;
  const Template a = template_for(gallery, cfg);
  const Template b = template_for(probe, cfg);
  const HammingResult r = iris::hamming(a.code, b.code, max_shift.value_or(cfg.max_shift));
  std::printf("hd=%.6f shift=%d decision=%s\n", r.hd, r.shift, std::string(to_string(iris::decide(r.hd))).c_str());
  return 0;
}

int cmd_localize(const std::string& image, const std::string& config, const std::string& code_out) {
  const IrisPipelineConfig cfg = pipeline_from(config).iris;
  const GrayImage img = imagekit::load_image(image);
  if (!code_out.empty()) {
    const Template t = iris::enroll(img, cfg);
    iris::save_code(t.code, code_out);
    std::cout << iris::to_json(t.geometry) << '\n';
    return 0;
  }
  std::cout << iris::to_json(iris::localize(img, cfg.localizer)) << '\n';
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Compressive-sensing reconstruction and iris recognition experiments"};
  app.require_subcommand(1);

  std::string run_config, run_out;
  std::size_t run_workers = 0;
  auto* run = app.add_subcommand("run", "Run the full domain x fraction experiment");
  run->add_option("--config", run_config, "INI experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--workers", run_workers, "Override the worker count");
  run->add_option("--out", run_out, "Override the output directory");

  ReconArgs recon_args;
  auto* rec = app.add_subcommand("recon", "Reconstruct one image from a random pixel subset");
  rec->add_option("--image", recon_args.image)->required()->check(CLI::ExistingFile);
  rec->add_option("--fraction", recon_args.fraction, "Fraction of pixels kept")->check(CLI::Range(0.0, 1.0));
  rec->add_option("--domain", recon_args.domain, "dct or dft");
  rec->add_option("--mode", recon_args.mode, "tv, l1 or tv_domain");
  rec->add_option("--seed", recon_args.seed, "Mask seed");
  rec->add_option("--out", recon_args.out, "Output image (.png or .pgm)")->required();
  rec->add_option("--config", recon_args.config, "INI file with a [solver] section")->check(CLI::ExistingFile);
  rec->add_option("--report", recon_args.report, "Write the solver report as JSON");

  std::string probe, gallery, match_config;
  std::optional<int> max_shift;
  auto* match = app.add_subcommand("match", "Compare two eye images (or saved iris codes)");
  match->add_option("--probe", probe)->required()->check(CLI::ExistingFile);
  match->add_option("--gallery", gallery)->required()->check(CLI::ExistingFile);
  match->add_option("--config", match_config, "INI file with an [iris] section")->check(CLI::ExistingFile);
  match->add_option("--max-shift", max_shift, "Rotation search range in angular lattice steps");

  std::string loc_image, loc_config, loc_code;
  auto* loc = app.add_subcommand("localize", "Print the detected pupil and iris circles as JSON");
  loc->add_option("--image", loc_image)->required()->check(CLI::ExistingFile);
  loc->add_option("--config", loc_config, "INI file with an [iris] section")->check(CLI::ExistingFile);
  loc->add_option("--save-code", loc_code, "Also encode the iris and write its code here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_config, run_workers, run_out);
    if (*rec) return cmd_recon(recon_args);
    if (*match) return cmd_match(probe, gallery, match_config, max_shift);
    if (*loc) return cmd_localize(loc_image, loc_config, loc_code);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidConfig ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace iriscs
