#include "iriscs/harness.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "iriscs/error.hpp"
#include "iriscs/sampling.hpp"
#include "json_io.hpp"
#include "text_util.hpp"

namespace fs = std::filesystem;

namespace iriscs {

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, "experiment: " + what); };
  if (fractions.empty()) fail("fractions must be nonempty");
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) fail("fraction " + std::to_string(f) + " outside (0, 1]");
  }
  if (domains.empty()) fail("domains must be nonempty");
  if (output_dir.empty()) fail("output_dir must be set");
  solver.validate();
}

std::vector<double> ExperimentReport::sorted_fractions() const {
  std::vector<double> f = config.fractions;
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  return f;
}

namespace {

std::size_t index_of(const std::vector<double>& values, double v) {
  return static_cast<std::size_t>(std::find(values.begin(), values.end(), v) - values.begin());
}

std::size_t index_of(const std::vector<TransformDomain>& values, TransformDomain v) {
  return static_cast<std::size_t>(std::find(values.begin(), values.end(), v) - values.begin());
}

std::string format_number(double v, int decimals) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// Shortest round-trip text, used for fraction column headers and file names.
std::string format_fraction(double f) {
  std::ostringstream out;
  out << f;
  return out.str();
}

}  // namespace

std::vector<std::vector<double>> ExperimentReport::psnr_matrix() const {
  const auto fr = sorted_fractions();
  std::vector<std::vector<double>> sum(config.domains.size(), std::vector<double>(fr.size(), 0.0));
  std::vector<std::vector<std::size_t>> count(config.domains.size(), std::vector<std::size_t>(fr.size(), 0));
  for (const auto& rec : records) {
    const auto d = index_of(config.domains, rec.domain);
    const auto f = index_of(fr, rec.fraction);
    sum[d][f] += rec.psnr_db;
    ++count[d][f];
  }
  for (std::size_t d = 0; d < sum.size(); ++d) {
    for (std::size_t f = 0; f < fr.size(); ++f) {
      sum[d][f] = count[d][f] ? sum[d][f] / static_cast<double>(count[d][f]) : std::nan("");
    }
  }
  return sum;
}

std::vector<std::vector<Decision>> ExperimentReport::decision_matrix() const {
  const auto fr = sorted_fractions();
  std::vector<std::vector<Decision>> out(config.domains.size(), std::vector<Decision>(fr.size(), Decision::Pass));
  std::vector<std::vector<bool>> seen(config.domains.size(), std::vector<bool>(fr.size(), false));
  for (const auto& rec : records) {
    const auto d = index_of(config.domains, rec.domain);
    const auto f = index_of(fr, rec.fraction);
    seen[d][f] = true;
    if (rec.decision == Decision::Fail) out[d][f] = Decision::Fail;
  }
  for (std::size_t d = 0; d < out.size(); ++d) {
    for (std::size_t f = 0; f < fr.size(); ++f) {
      if (!seen[d][f]) out[d][f] = Decision::Fail;
    }
  }
  return out;
}

namespace harness {

std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& label, TransformDomain domain, double fraction) {
  std::uint64_t h = mix64(base_seed);
  for (unsigned char byte : label) h = mix64(h ^ byte);
  h = mix64(h ^ (domain == TransformDomain::DCT ? 0u : 1u));
  h = mix64(h ^ static_cast<std::uint64_t>(std::llround(fraction * 1000.0)));
  return h;
}

namespace {

using Section = std::map<std::string, std::string>;

std::map<std::string, Section> read_ini(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open config " + path.string());
  // boost's INI reader only knows ';' comments; drop '#' lines first.
  std::ostringstream cleaned;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = text::trim(line);
    if (!t.empty() && t[0] == '#') continue;
    cleaned << line << '\n';
  }
  std::istringstream src(cleaned.str());
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(src, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  std::map<std::string, Section> out;
  for (const auto& [name, section] : tree) {
    if (section.empty()) throw Error(ErrorCode::InvalidConfig, path.string() + ": key '" + name + "' outside a section");
    Section& s = out[name];
    for (const auto& [key, value] : section) s[key] = text::trim(value.data());
  }
  return out;
}

std::vector<AngularInterval> parse_arcs_deg(const std::string& key, const std::string& value) {
  std::vector<AngularInterval> arcs;
  if (value == "none" || value.empty()) return arcs;
  for (const auto& item : text::split(value, ',')) {
    const auto ends = text::split(item, ':');
    if (ends.size() != 2) throw Error(ErrorCode::InvalidConfig, key + ": expected begin:end pairs in degrees");
    constexpr double kDeg = std::numbers::pi / 180.0;
    arcs.push_back({text::parse_real(key, ends[0]) * kDeg, text::parse_real(key, ends[1]) * kDeg});
  }
  return arcs;
}

}  // namespace

IrisPipelineConfig iris_config_from(const std::map<std::string, std::string>& entries, IrisPipelineConfig cfg) {
  using text::parse_count;
  using text::parse_int;
  using text::parse_real;
  const auto get = [&](const char* key) -> const std::string* {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  // Resolution changes re-derive the default filter bank; explicit gabor_* keys apply afterwards.
  if (auto* v = get("radial_res")) cfg.radial_res = parse_count("radial_res", *v);
  if (auto* v = get("angular_res")) cfg.angular_res = parse_count("angular_res", *v);
  if (get("radial_res") || get("angular_res")) cfg.bank = GaborBank::defaults(cfg.radial_res, cfg.angular_res);

  for (const auto& [key, value] : entries) {
    LocalizerConfig& loc = cfg.localizer;
    if (key == "radial_res" || key == "angular_res") continue;
    else if (key == "pupil_r_min") loc.pupil_r_min = parse_int(key, value);
    else if (key == "pupil_r_max") loc.pupil_r_max = parse_int(key, value);
    else if (key == "iris_r_min") loc.iris_r_min = parse_int(key, value);
    else if (key == "iris_r_max") loc.iris_r_max = parse_int(key, value);
    else if (key == "center_stride") loc.center_stride = parse_int(key, value);
    else if (key == "sigma") loc.sigma = parse_real(key, value);
    else if (key == "angular_samples") loc.angular_samples = parse_count(key, value);
    else if (key == "exclusion_arcs_deg") loc.exclusion_arcs = parse_arcs_deg(key, value);
    else if (key == "floor_response") loc.floor_response = parse_real(key, value);
    else if (key == "iris_center_tolerance") loc.iris_center_tolerance = parse_real(key, value);
    else if (key == "min_visible_fraction") loc.min_visible_fraction = parse_real(key, value);
    else if (key == "max_shift") cfg.max_shift = parse_int(key, value);
    else if (key == "gabor_alpha") cfg.bank.alpha = parse_real(key, value);
    else if (key == "gabor_beta") cfg.bank.beta = parse_real(key, value);
    else if (key == "gabor_radial_sites") cfg.bank.radial_sites = parse_count(key, value);
    else if (key == "gabor_angular_sites") cfg.bank.angular_sites = parse_count(key, value);
    else if (key == "gabor_wavelengths") {
      cfg.bank.wavelengths.clear();
      for (const auto& w : text::split(value, ',')) cfg.bank.wavelengths.push_back(parse_real(key, w));
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown iris key '" + key + "'");
    }
  }
  if (cfg.max_shift < 0) throw Error(ErrorCode::InvalidConfig, "max_shift must be >= 0");
  return cfg;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  PipelineConfig out;
  for (const auto& [name, entries] : read_ini(path)) {
    if (name == "solver") out.solver = solver_config_from(entries, out.solver);
    else if (name == "iris") out.iris = iris_config_from(entries, out.iris);
    else if (name != "experiment") throw Error(ErrorCode::InvalidConfig, "unknown config section [" + name + "]");
  }
  return out;
}

ExperimentConfig load_config(const fs::path& path) {
  const auto sections = read_ini(path);
  const fs::path base = path.parent_path();
  const auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  ExperimentConfig cfg;
  for (const auto& [name, entries] : sections) {
    if (name == "solver") {
      cfg.solver = solver_config_from(entries, cfg.solver);
    } else if (name == "iris") {
      cfg.iris = iris_config_from(entries, cfg.iris);
    } else if (name == "experiment") {
      for (const auto& [key, value] : entries) {
        if (key == "manifest") cfg.manifest = resolve(value);
        else if (key == "output_dir") cfg.output_dir = resolve(value);
        else if (key == "base_seed") cfg.base_seed = text::parse_count(key, value);
        else if (key == "workers") cfg.workers = std::max<std::size_t>(1, text::parse_count(key, value));
        else if (key == "fractions") {
          cfg.fractions.clear();
          for (const auto& f : text::split(value, ',')) cfg.fractions.push_back(text::parse_real(key, f));
        } else if (key == "domains") {
          cfg.domains.clear();
          for (const auto& d : text::split(value, ',')) cfg.domains.push_back(parse_domain(d));
        } else {
          throw Error(ErrorCode::InvalidConfig, "unknown experiment key '" + key + "'");
        }
      }
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown config section [" + name + "]");
    }
  }
  if (cfg.manifest.empty()) throw Error(ErrorCode::InvalidConfig, "[experiment] manifest is required");
  if (!sections.contains("experiment") || !sections.at("experiment").contains("output_dir")) {
    cfg.output_dir = base / cfg.output_dir;
  }
  cfg.validate();
  return cfg;
}

namespace {

struct Subject {
  std::string label;
  GrayImage image;
  Template enrolled;
};

struct CellTask {
  std::size_t subject = 0;
  TransformDomain domain = TransformDomain::DCT;
  double fraction = 0.0;
};

CellRecord run_cell(const Subject& subject, const CellTask& task, const ExperimentConfig& cfg) {
  CellRecord rec;
  rec.label = subject.label;
  rec.domain = task.domain;
  rec.fraction = task.fraction;
  rec.cell_seed = cell_seed(cfg.base_seed, subject.label, task.domain, task.fraction);

  const GrayImage& original = subject.image;
  const SampleMask mask = sampling::generate_mask(original.height(), original.width(), task.fraction, rec.cell_seed);
  const Measurements meas = sampling::measure(original, mask);
  SolverConfig solver = cfg.solver;
  solver.domain = task.domain;
  const ReconResult result = recon::reconstruct(meas, mask, solver);
  GrayImage probe = imagekit::quantize(result.image);
  rec.psnr_db = imagekit::psnr(original, probe);
  rec.iterations = result.report.iterations;
  rec.converged = result.report.converged;

  try {
    const Template probe_template = iris::enroll(probe, cfg.iris);
    const HammingResult match = iris::hamming(subject.enrolled.code, probe_template.code, cfg.iris.max_shift);
    rec.hd = match.hd;
    rec.best_shift = match.shift;
    rec.decision = iris::decide(match.hd);
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::LocalizationFailed:
      case ErrorCode::VisibilityRejected:
      case ErrorCode::DegenerateContour:
      case ErrorCode::EmptyJointMask:
      case ErrorCode::InvalidConfig:
        rec.decision = Decision::Fail;
        rec.reason = e.what();
        break;
      default:
        throw;
    }
  }
  rec.reconstruction = std::move(probe);
  return rec;
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const DatasetManifest manifest = imagekit::load_manifest(cfg.manifest);

  ExperimentReport report;
  report.config = cfg;

  std::vector<Subject> subjects;
  for (const auto& entry : manifest.entries) {
    GrayImage image = imagekit::load_image(entry.path);
    try {
      Template enrolled = iris::enroll(image, cfg.iris);
      subjects.push_back({entry.label, std::move(image), std::move(enrolled)});
    } catch (const Error& e) {
      report.skipped.push_back({entry.label, std::string("EnrollmentFailed: ") + e.what()});
    }
  }

  std::vector<CellTask> tasks;
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    for (TransformDomain d : cfg.domains) {
      for (double f : report.sorted_fractions()) tasks.push_back({s, d, f});
    }
  }
  std::vector<CellRecord> records(tasks.size());
  parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) {
    records[i] = run_cell(subjects[tasks[i].subject], tasks[i], cfg);
  });

  std::stable_sort(records.begin(), records.end(), [](const CellRecord& a, const CellRecord& b) {
    if (a.label != b.label) return a.label < b.label;
    if (a.domain != b.domain) return a.domain < b.domain;
    return a.fraction < b.fraction;
  });
  std::sort(report.skipped.begin(), report.skipped.end(),
            [](const SkippedImage& a, const SkippedImage& b) { return a.label < b.label; });
  report.records = std::move(records);
  return report;
}

std::string psnr_csv(const ExperimentReport& report) {
  const auto fr = report.sorted_fractions();
  const auto m = report.psnr_matrix();
  std::string out = "domain";
  for (double f : fr) out += "," + format_fraction(f);
  out += "\n";
  for (std::size_t d = 0; d < report.config.domains.size(); ++d) {
    out += std::string(to_string(report.config.domains[d]));
    for (double v : m[d]) out += "," + format_number(v, 4);
    out += "\n";
  }
  return out;
}

std::string decisions_csv(const ExperimentReport& report) {
  const auto fr = report.sorted_fractions();
  const auto m = report.decision_matrix();
  std::string out = "domain";
  for (double f : fr) out += "," + format_fraction(f);
  out += "\n";
  for (std::size_t d = 0; d < report.config.domains.size(); ++d) {
    out += std::string(to_string(report.config.domains[d]));
    for (Decision v : m[d]) out += "," + std::string(to_string(v));
    out += "\n";
  }
  return out;
}

std::string hd_curve_csv(const ExperimentReport& report) {
  std::string out = "label,domain,fraction,hd\n";
  for (const auto& rec : report.records) {
    out += rec.label + "," + std::string(to_string(rec.domain)) + "," + format_fraction(rec.fraction) + "," +
           (rec.hd ? format_number(*rec.hd, 6) : std::string()) + "\n";
  }
  return out;
}

// Output location and worker count are left out: neither changes a result,
// and both would make otherwise identical runs differ byte-wise.
std::string report_json(const ExperimentReport& report) {
  using nlohmann::json;
  const ExperimentConfig& cfg = report.config;
  json config{{"manifest", cfg.manifest.generic_string()},
              {"fractions", report.sorted_fractions()},
              {"base_seed", cfg.base_seed},
              {"solver", cfg.solver},
              {"iris", cfg.iris}};
  json domains = json::array();
  for (auto d : cfg.domains) domains.push_back(to_string(d));
  config["domains"] = domains;

  json records = json::array();
  for (const auto& rec : report.records) {
    records.push_back({{"label", rec.label},
                       {"domain", to_string(rec.domain)},
                       {"fraction", rec.fraction},
                       {"cell_seed", rec.cell_seed},
                       {"psnr_db", number_or_tag(rec.psnr_db)},
                       {"hd", rec.hd ? json(*rec.hd) : json(nullptr)},
                       {"best_shift", rec.best_shift},
                       {"decision", to_string(rec.decision)},
                       {"reason", rec.reason},
                       {"iterations", rec.iterations},
                       {"converged", rec.converged}});
  }
  json skipped = json::array();
  for (const auto& s : report.skipped) skipped.push_back({{"label", s.label}, {"reason", s.reason}});

  json psnr = json::object(), decisions = json::object();
  const auto fr = report.sorted_fractions();
  const auto pm = report.psnr_matrix();
  const auto dm = report.decision_matrix();
  for (std::size_t d = 0; d < cfg.domains.size(); ++d) {
    json prow = json::array(), drow = json::array();
    for (std::size_t f = 0; f < fr.size(); ++f) {
      prow.push_back(number_or_tag(pm[d][f]));
      drow.push_back(to_string(dm[d][f]));
    }
    psnr[std::string(to_string(cfg.domains[d]))] = prow;
    decisions[std::string(to_string(cfg.domains[d]))] = drow;
  }

  json hd_curves = json::object();
  for (const auto& rec : report.records) {
    hd_curves[rec.label][std::string(to_string(rec.domain))].push_back(rec.hd ? json(*rec.hd) : json(nullptr));
  }

  json doc{{"config", config},
           {"records", records},
           {"skipped", skipped},
           {"psnr_matrix", psnr},
           {"decision_matrix", decisions},
           {"hd_curves", hd_curves},
           {"match_threshold", iris::kMatchThreshold}};
  return doc.dump(2) + "\n";
}

void emit_tables(const ExperimentReport& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  const auto write = [&](const char* name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / name).string());
    out << body;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + (dir / name).string());
  };
  write("psnr.csv", psnr_csv(report));
  write("decisions.csv", decisions_csv(report));
  write("hd_curve.csv", hd_curve_csv(report));
  write("report.json", report_json(report));

  for (const auto& rec : report.records) {
    if (!rec.reconstruction) continue;
    const fs::path sub = dir / "recon" / rec.label;
    fs::create_directories(sub, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + sub.string() + ": " + ec.message());
    imagekit::save_image(*rec.reconstruction,
                         sub / (std::string(to_string(rec.domain)) + "_" + format_fraction(rec.fraction) + ".png"));
  }
}

}  // namespace harness
}  // namespace iriscs
