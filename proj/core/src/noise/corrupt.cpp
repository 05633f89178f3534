#include "hpc/noise/corrupt.hpp"

#include <stdexcept>

namespace hpc::noise {

EpisodeScanNoise draw_episode_scan_noise(const ScanCorruptionSpec& spec, double length_scale,
                                         std::span<const double> offsets, Rng& rng) {
  EpisodeScanNoise n;
  const size_t cells = offsets.size();
  n.alpha.resize(spec.per_cell_alpha ? cells : 1);
  for (auto& a : n.alpha) a = rng.uniform(spec.alpha_lo, spec.alpha_hi);
  n.beta.resize(spec.per_cell_beta ? cells : 1);
  for (auto& b : n.beta) b = rng.normal(0.0, spec.beta_std);
  if (spec.gp.variance > 0.0)
    n.gp = std::make_shared<GpSampler>(offsets, length_scale, spec.gp.variance);
  return n;
}

void corrupt_scan(std::span<const double> clean, const EpisodeScanNoise& noise, double intensity,
                  Rng& step_rng, std::span<double> out) {
  if (out.size() != clean.size()) throw std::invalid_argument("corrupt_scan: size mismatch");
  if (intensity == 0.0) {
    std::copy(clean.begin(), clean.end(), out.begin());
    return;
  }
  std::vector<double> eps;
  if (noise.gp) {
    eps.resize(clean.size());
    if (noise.gp->dim() != static_cast<int>(clean.size()))
      throw std::invalid_argument("corrupt_scan: gp dimension mismatch");
    noise.gp->sample(step_rng, eps);
  }
  for (size_t i = 0; i < clean.size(); ++i) {
    const double a = noise.alpha[noise.alpha.size() > 1 ? i : 0];
    const double b = noise.beta[noise.beta.size() > 1 ? i : 0];
    const double alpha_eff = 1.0 + (a - 1.0) * intensity;
    const double e = eps.empty() ? 0.0 : eps[i];
    out[i] = alpha_eff * clean[i] + b * intensity + e * intensity;
  }
}

}  // namespace hpc::noise
