#include "iriscs/recon.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <sstream>

#include "iriscs/error.hpp"
#include "json_io.hpp"
#include "text_util.hpp"

namespace iriscs {

std::string_view to_string(SolverMode mode) noexcept {
  switch (mode) {
    case SolverMode::TV: return "TV";
    case SolverMode::L1: return "L1";
    case SolverMode::TVDomain: return "TV_DOMAIN";
  }
  return "?";
}

SolverMode parse_mode(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "tv") return SolverMode::TV;
  if (lower == "l1") return SolverMode::L1;
  if (lower == "tv_domain" || lower == "tv-domain") return SolverMode::TVDomain;
  throw Error(ErrorCode::InvalidConfig, "unknown solver mode '" + std::string(text) + "'");
}

void SolverConfig::validate() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(epsilon >= 0.0)) fail("epsilon must be >= 0");
  if (max_iters < 1) fail("max_iters must be >= 1");
  if (!(step_size > 0.0)) fail("step_size must be > 0");
  if (!(tv_smoothing > 0.0)) fail("tv_smoothing must be > 0");
  if (!(threshold_start > 0.0)) fail("threshold_start must be > 0");
  if (!(threshold_decay > 0.0 && threshold_decay <= 1.0)) fail("threshold_decay must lie in (0, 1]");
  if (!(convergence_tol >= 0.0)) fail("convergence_tol must be >= 0");
}

std::string to_key_values(const SolverConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "mode=" << to_string(cfg.mode) << '\n'
      << "domain=" << to_string(cfg.domain) << '\n'
      << "epsilon=" << cfg.epsilon << '\n'
      << "max_iters=" << cfg.max_iters << '\n'
      << "step_size=" << cfg.step_size << '\n'
      << "tv_smoothing=" << cfg.tv_smoothing << '\n'
      << "threshold_start=" << cfg.threshold_start << '\n'
      << "threshold_decay=" << cfg.threshold_decay << '\n'
      << "convergence_tol=" << cfg.convergence_tol << '\n';
  return out.str();
}

namespace {

using text::parse_real;

std::size_t parse_count(const std::string& key, const std::string& value) {
  return static_cast<std::size_t>(text::parse_count(key, value));
}

}  // namespace

SolverConfig solver_config_from(const std::map<std::string, std::string>& entries, SolverConfig cfg) {
  for (const auto& [key, value] : entries) {
    if (key == "mode") cfg.mode = parse_mode(value);
    else if (key == "domain") cfg.domain = parse_domain(value);
    else if (key == "epsilon") cfg.epsilon = parse_real(key, value);
    else if (key == "max_iters") cfg.max_iters = parse_count(key, value);
    else if (key == "step_size") cfg.step_size = parse_real(key, value);
    else if (key == "tv_smoothing") cfg.tv_smoothing = parse_real(key, value);
    else if (key == "threshold_start") cfg.threshold_start = parse_real(key, value);
    else if (key == "threshold_decay") cfg.threshold_decay = parse_real(key, value);
    else if (key == "convergence_tol") cfg.convergence_tol = parse_real(key, value);
    else throw Error(ErrorCode::InvalidConfig, "unknown solver key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

namespace recon {

GradientField gradient_field(const Grid& img) {
  const std::size_t rows = img.rows(), cols = img.cols();
  GradientField d{Grid(rows, cols), Grid(rows, cols)};
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (i + 1 < rows) d.vertical(i, j) = img(i + 1, j) - img(i, j);
      if (j + 1 < cols) d.horizontal(i, j) = img(i, j + 1) - img(i, j);
    }
  }
  return d;
}

double tv(const Grid& img) {
  const GradientField d = gradient_field(img);
  double total = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) total += std::hypot(d.vertical[i], d.horizontal[i]);
  return total;
}

double smoothed_tv(const Grid& img, double smoothing) {
  const GradientField d = gradient_field(img);
  const double s2 = smoothing * smoothing;
  double total = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    total += std::sqrt(d.vertical[i] * d.vertical[i] + d.horizontal[i] * d.horizontal[i] + s2);
  }
  return total;
}

Grid tv_gradient(const Grid& img, double smoothing) {
  if (!(smoothing > 0.0)) throw Error(ErrorCode::InvalidConfig, "tv smoothing must be > 0");
  const std::size_t rows = img.rows(), cols = img.cols();
  const GradientField d = gradient_field(img);
  const double s2 = smoothing * smoothing;
  Grid g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double dv = d.vertical(i, j);
      const double dh = d.horizontal(i, j);
      const double norm = std::sqrt(dv * dv + dh * dh + s2);
      const double wv = dv / norm;
      const double wh = dh / norm;
      g(i, j) -= wv + wh;
      if (i + 1 < rows) g(i + 1, j) += wv;
      if (j + 1 < cols) g(i, j + 1) += wh;
    }
  }
  return g;
}

namespace {

void check_consistent(const Measurements& meas, const SampleMask& mask) {
  if (meas.rows != mask.rows || meas.cols != mask.cols || mask.kept.size() != mask.rows * mask.cols) {
    throw Error(ErrorCode::InconsistentMeasurements, "measurement and mask dimensions differ");
  }
  if (meas.values.empty()) throw Error(ErrorCode::InconsistentMeasurements, "no measurements");
  std::size_t prev = 0;
  bool first = true;
  for (const auto& m : meas.values) {
    if (m.row >= mask.rows || m.col >= mask.cols || !mask.is_kept(m.row, m.col)) {
      throw Error(ErrorCode::InconsistentMeasurements, "measurement at (" + std::to_string(m.row) + "," +
                                                           std::to_string(m.col) + ") is not in the mask");
    }
    const std::size_t idx = m.row * mask.cols + m.col;
    if (!first && idx <= prev) throw Error(ErrorCode::InconsistentMeasurements, "measurements not in row-major order");
    if (!std::isfinite(m.value)) throw Error(ErrorCode::InconsistentMeasurements, "non-finite measurement");
    prev = idx;
    first = false;
  }
}

// Projects x onto {x : ||x_kept - y||_2 <= epsilon} by rescaling the residual on the kept set.
void project_onto_data(Grid& x, const Measurements& meas, double epsilon) {
  double r2 = 0.0;
  for (const auto& m : meas.values) {
    const double r = x(m.row, m.col) - m.value;
    r2 += r * r;
  }
  const double norm = std::sqrt(r2);
  if (norm <= epsilon) return;
  const double scale = epsilon / norm;
  for (const auto& m : meas.values) x(m.row, m.col) = m.value + scale * (x(m.row, m.col) - m.value);
}

double residual_norm(const Grid& x, const Measurements& meas) {
  double r2 = 0.0;
  for (const auto& m : meas.values) {
    const double r = x(m.row, m.col) - m.value;
    r2 += r * r;
  }
  return std::sqrt(r2);
}

void gradient_step(Grid& x, double step, double smoothing) {
  const Grid g = tv_gradient(x, smoothing);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= step * g[i];
}

// Dual state of the TV primal-dual iteration.
class TvDual {
 public:
  TvDual(const Grid& x0, double tau)
      : tau_(tau), sigma_(1.0 / (8.0 * tau)), pv_(x0.rows(), x0.cols()), ph_(x0.rows(), x0.cols()), xbar_(x0) {}

  // Dual ascent at the extrapolated point, then x -= tau * D^T p.
  void step(Grid& x) {
    const GradientField d = gradient_field(xbar_);
    for (std::size_t i = 0; i < pv_.size(); ++i) {
      const double a = pv_[i] + sigma_ * d.vertical[i];
      const double b = ph_[i] + sigma_ * d.horizontal[i];
      const double n = std::max(1.0, std::hypot(a, b));
      pv_[i] = a / n;
      ph_[i] = b / n;
    }
    const std::size_t rows = x.rows(), cols = x.cols();
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        // Adjoint of the forward difference: -div p.
        const double a = i + 1 < rows ? pv_(i, j) : 0.0;
        const double b = j + 1 < cols ? ph_(i, j) : 0.0;
        const double up = i > 0 ? pv_(i - 1, j) : 0.0;
        const double left = j > 0 ? ph_(i, j - 1) : 0.0;
        x(i, j) -= tau_ * (up + left - a - b);
      }
    }
  }

  void extrapolate(const Grid& x, const Grid& previous) {
    for (std::size_t i = 0; i < x.size(); ++i) xbar_[i] = 2.0 * x[i] - previous[i];
  }

 private:
  double tau_;
  double sigma_;
  Grid pv_;
  Grid ph_;
  Grid xbar_;
};

double relative_change(const Grid& now, const Grid& before) {
  double diff = 0.0, base = 0.0;
  for (std::size_t i = 0; i < now.size(); ++i) {
    const double d = now[i] - before[i];
    diff += d * d;
    base += before[i] * before[i];
  }
  if (base == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(diff / base);
}

}  // namespace

ReconResult reconstruct(const Measurements& meas, const SampleMask& mask, const SolverConfig& cfg) {
  cfg.validate();
  check_consistent(meas, mask);

  Grid x = sampling::embed(meas, meas.mean());
  ReconReport report;
  report.config = cfg;

  std::optional<transforms::Plan> plan;
  if (cfg.mode != SolverMode::TV) plan.emplace(x.rows(), x.cols(), cfg.domain);
  double reference_magnitude = 0.0;
  double threshold_scale = cfg.threshold_start;

  // TV mode runs a primal-dual iteration: the primal update is a step along
  // -D^T p (p the dual estimate of Dx/|Dx|, a TV subgradient) followed by the
  // data projection. The TV subgradient is scale-free, so the primal step is
  // sized from the measured intensity range; sigma * tau * ||D||^2 = 1.
  std::optional<TvDual> dual;
  if (cfg.mode == SolverMode::TV) {
    const auto [lo, hi] = std::minmax_element(meas.values.begin(), meas.values.end(),
                                              [](const Measurement& a, const Measurement& b) { return a.value < b.value; });
    const double tau = cfg.step_size * std::max(hi->value - lo->value, 1.0) / 8.0;
    dual.emplace(x, tau);
  }

  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    const Grid previous = x;
    if (cfg.mode == SolverMode::TV) {
      dual->step(x);
      project_onto_data(x, meas, cfg.epsilon);
      dual->extrapolate(x, previous);
    } else {
      project_onto_data(x, meas, cfg.epsilon);
      CoeffGrid coeffs = plan->forward(x);
      if (k == 0) reference_magnitude = coeffs.max_magnitude();
      const double tau = reference_magnitude * threshold_scale;
      threshold_scale *= cfg.threshold_decay;
      coeffs = cfg.mode == SolverMode::L1 ? transforms::soft_threshold(coeffs, tau)
                                          : transforms::hard_threshold_below(coeffs, tau);
      Synthesis synth = plan->inverse(coeffs);
      report.max_discarded_imag_norm = std::max(report.max_discarded_imag_norm, synth.discarded_imag_norm);
      x = std::move(synth.image);
      if (cfg.mode == SolverMode::TVDomain) gradient_step(x, cfg.step_size, cfg.tv_smoothing);
    }
    report.tv_trace.push_back(tv(x));
    report.iterations = k + 1;
    // While the threshold is still large, a stalled iterate only means no
    // coefficient has crossed it yet; convergence is judged once it has decayed.
    const bool schedule_done = cfg.mode == SolverMode::TV || threshold_scale <= cfg.convergence_tol;
    if (schedule_done && relative_change(x, previous) < cfg.convergence_tol) {
      report.converged = true;
      break;
    }
  }

  project_onto_data(x, meas, cfg.epsilon);
  for (double& v : x.values()) v = std::clamp(v, 0.0, 255.0);
  report.final_tv = tv(x);
  report.final_residual = residual_norm(x, meas);
  return {GrayImage(std::move(x)), std::move(report)};
}

std::string to_json(const ReconReport& report) {
  nlohmann::json j = report;
  return j.dump(2);
}

}  // namespace recon

nlohmann::json number_or_tag(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void to_json(nlohmann::json& j, const SolverConfig& cfg) {
  j = nlohmann::json{{"mode", to_string(cfg.mode)},
                     {"domain", to_string(cfg.domain)},
                     {"epsilon", cfg.epsilon},
                     {"max_iters", cfg.max_iters},
                     {"step_size", cfg.step_size},
                     {"tv_smoothing", cfg.tv_smoothing},
                     {"threshold_start", cfg.threshold_start},
                     {"threshold_decay", cfg.threshold_decay},
                     {"convergence_tol", cfg.convergence_tol}};
}

void to_json(nlohmann::json& j, const ReconReport& report) {
  nlohmann::json trace = nlohmann::json::array();
  for (double v : report.tv_trace) trace.push_back(number_or_tag(v));
  j = nlohmann::json{{"iterations", report.iterations},
                     {"final_tv", number_or_tag(report.final_tv)},
                     {"final_residual", number_or_tag(report.final_residual)},
                     {"converged", report.converged},
                     {"max_discarded_imag_norm", number_or_tag(report.max_discarded_imag_norm)},
                     {"tv_trace", std::move(trace)},
                     {"config", report.config}};
}

}  // namespace iriscs
