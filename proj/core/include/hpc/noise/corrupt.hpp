#pragma once

#include "hpc/noise/matern.hpp"

namespace hpc::noise {

// Elevation-scan corruption: e~ = alpha * e + beta + eps, where alpha and
// beta are drawn once per episode and eps is a correlated GP draw per step.
// The intensity multiplier scales the deviation from the clean scan:
// alpha -> 1 + (alpha-1)*intensity, beta -> beta*intensity,
// eps -> eps*intensity, so intensity 0 is the identity bit-exactly.
struct ScanCorruptionSpec {
  double alpha_lo = 0.8, alpha_hi = 1.2;
  double beta_std = 0.05;  // m
  bool per_cell_alpha = false;
  bool per_cell_beta = false;
  GpNoiseSpec gp;
};

struct EpisodeScanNoise {
  std::vector<double> alpha;  // 1 entry, or one per scan cell
  std::vector<double> beta;
  std::shared_ptr<const GpSampler> gp;  // null disables the eps term
};

// Draw order: alpha value(s), then beta value(s).
EpisodeScanNoise draw_episode_scan_noise(const ScanCorruptionSpec& spec, double length_scale,
                                         std::span<const double> offsets, Rng& rng);

// Per-step corruption; eps is redrawn from the episode's GP every call.
// Consumes no draws when intensity == 0.
void corrupt_scan(std::span<const double> clean, const EpisodeScanNoise& noise, double intensity,
                  Rng& step_rng, std::span<double> out);

}  // namespace hpc::noise
