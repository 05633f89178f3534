#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hpc/common/rng.hpp"

namespace hpc::noise {

// Matern nu=3/2: k(d) = var * (1 + sqrt(3) d / l) * exp(-sqrt(3) d / l).
double matern32(double dist, double length_scale, double variance);

// Dense covariance over 1-D offsets (row-major n*n).
std::vector<double> matern_covariance(std::span<const double> offsets, double length_scale,
                                      double variance);

inline constexpr double kCholeskyJitter = 1e-10;

// Correlated Gaussian draws over fixed offsets: caches the Cholesky factor
// of the Matern covariance (plus jitter) at construction.
class GpSampler {
 public:
  GpSampler(std::span<const double> offsets, double length_scale, double variance);

  // out = L * eta, eta ~ N(0, I); consumes exactly 2*dim raw draws.
  void sample(Rng& rng, std::span<double> out) const;

  int dim() const { return n_; }
  double length_scale() const { return length_scale_; }
  double variance() const { return variance_; }
  std::span<const double> covariance() const { return cov_; }

 private:
  int n_;
  double length_scale_, variance_;
  std::vector<double> cov_;   // without jitter
  std::vector<double> chol_;  // factor of cov + jitter*I
};

// Linear ramp of the GP length scale over training progress. The clock is
// the student update counter; evaluation uses the end value.
struct GpNoiseSpec {
  double variance = 0.0009;  // (0.03 m)^2
  double length_scale_start = 0.02;
  double length_scale_end = 0.2;
  int64_t length_scale_steps = 20000;
};

double length_scale_at(const GpNoiseSpec& spec, int64_t update_index);

}  // namespace hpc::noise
