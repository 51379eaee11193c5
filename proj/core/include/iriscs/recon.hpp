#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "iriscs/imagekit.hpp"
#include "iriscs/sampling.hpp"
#include "iriscs/transforms.hpp"

namespace iriscs {

enum class SolverMode {
  TV,        // primal-dual TV minimization with projection onto the data
  L1,        // iterative soft thresholding in a transform domain
  TVDomain,  // iterative hard thresholding in a transform domain plus a TV step
};

std::string_view to_string(SolverMode mode) noexcept;
/// Accepts "tv", "l1", "tv_domain" (case-insensitive).
SolverMode parse_mode(std::string_view text);

struct SolverConfig {
  SolverMode mode = SolverMode::TVDomain;
  TransformDomain domain = TransformDomain::DCT;
  double epsilon = 0.0;  // data-fidelity radius, ||x_kept - y||_2 <= epsilon
  std::size_t max_iters = 300;
  double step_size = 0.25;  // TV mode: primal step is step_size * (measured range) / 8
  double tv_smoothing = 1e-3;
  double threshold_start = 0.30;  // fraction of the initial largest coefficient magnitude
  double threshold_decay = 0.95;  // per-iteration multiplier on the threshold
  double convergence_tol = 1e-5;  // stop when ||x_k - x_{k-1}|| / ||x_{k-1}|| falls below

  /// Throws InvalidConfig when an invariant does not hold.
  void validate() const;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// Flat key=value lines (keys as the member names above), the format used in
/// the [solver] section of experiment config files.
std::string to_key_values(const SolverConfig& cfg);
/// Overrides fields of `base` from parsed key=value pairs; unknown keys throw InvalidConfig.
SolverConfig solver_config_from(const std::map<std::string, std::string>& entries, SolverConfig base = {});

/// Forward differences under the replicate boundary rule: differences that
/// would cross the last row or column are zero.
struct GradientField {
  Grid vertical;    // x(i+1, j) - x(i, j)
  Grid horizontal;  // x(i, j+1) - x(i, j)
};

struct ReconReport {
  std::size_t iterations = 0;
  double final_tv = 0.0;
  double final_residual = 0.0;  // ||x_kept - y||_2 of the returned image
  bool converged = false;
  std::vector<double> tv_trace;
  double max_discarded_imag_norm = 0.0;  // DFT only
  SolverConfig config;
};

struct ReconResult {
  GrayImage image;
  ReconReport report;
};

namespace recon {

GradientField gradient_field(const Grid& img);

/// Isotropic total variation: sum over pixels of ||D_ij x||_2.
double tv(const Grid& img);

/// sum sqrt(||D_ij x||^2 + smoothing^2), the functional tv_gradient differentiates.
double smoothed_tv(const Grid& img, double smoothing);

Grid tv_gradient(const Grid& img, double smoothing);

/// Recovers an image from pixel samples. Initialized from the measurements
/// embedded over their mean; output is clamped to [0, 255] only at the end.
/// Hitting max_iters is reported through `converged = false`, not thrown.
ReconResult reconstruct(const Measurements& meas, const SampleMask& mask, const SolverConfig& cfg);

std::string to_json(const ReconReport& report);

}  // namespace recon
}  // namespace iriscs
