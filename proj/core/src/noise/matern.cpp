#include "hpc/noise/matern.hpp"

#include <cmath>
#include <stdexcept>

#include "hpc/common/linalg.hpp"

namespace hpc::noise {

double matern32(double dist, double length_scale, double variance) {
  const double s = 1.7320508075688772935 * std::abs(dist) / length_scale;
  return variance * (1.0 + s) * std::exp(-s);
}

std::vector<double> matern_covariance(std::span<const double> offsets, double length_scale,
                                      double variance) {
  const size_t n = offsets.size();
  std::vector<double> cov(n * n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      cov[i * n + j] = matern32(offsets[i] - offsets[j], length_scale, variance);
  return cov;
}

GpSampler::GpSampler(std::span<const double> offsets, double length_scale, double variance)
    : n_(static_cast<int>(offsets.size())),
      length_scale_(length_scale),
      variance_(variance),
      cov_(matern_covariance(offsets, length_scale, variance)),
      chol_(cov_.size()) {
  std::vector<double> jittered = cov_;
  for (int i = 0; i < n_; ++i) jittered[static_cast<size_t>(i) * n_ + i] += kCholeskyJitter;
  if (!cholesky(jittered, n_, chol_))
    throw std::runtime_error("gp covariance not positive definite even with jitter");
}

void GpSampler::sample(Rng& rng, std::span<double> out) const {
  if (out.size() != static_cast<size_t>(n_))
    throw std::invalid_argument("gp sample: wrong output size");
  std::vector<double> eta(n_);
  for (auto& e : eta) e = rng.normal();
  lower_tri_matvec(chol_, n_, eta, out);
}

double length_scale_at(const GpNoiseSpec& spec, int64_t update_index) {
  if (spec.length_scale_steps <= 0) return spec.length_scale_end;
  const double t = static_cast<double>(update_index) / static_cast<double>(spec.length_scale_steps);
  const double u = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  return spec.length_scale_start + (spec.length_scale_end - spec.length_scale_start) * u;
}

}  // namespace hpc::noise
