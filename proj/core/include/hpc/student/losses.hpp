#pragma once

#include <cstdint>

#include "hpc/student/nets.hpp"

namespace hpc::student {

// Annealing weight on the KL term, clocked by gradient-update count.
inline double beta_schedule(int64_t t, const StudentTrainConfig& cfg) {
  const double b = cfg.beta_base + cfg.beta_slope * static_cast<double>(t);
  return b < cfg.beta_cap ? b : cfg.beta_cap;
}

struct ElboParts {
  ad::Tensor loss;        // recon + beta * kl (graph)
  double recon = 0.0;     // sum over dims, mean over batch
  double kl = 0.0;        // closed form, mean over batch
  double recon_mse_total = 0.0;  // per-element mean, for reporting
  double recon_mse_scan = 0.0;   // per-element mean over the scan block
};

// Unit-variance Gaussian likelihood: reconstruction term is the squared
// error summed over target dims (mean over the batch), matching the
// closed-form KL 0.5*sum(mu^2 + sigma^2 - 1 - 2 log sigma).
ElboParts elbo_loss(const StudentNets& nets, const EncodeOut& enc, const ad::Tensor& target,
                    double beta);

// Mean over batch and action dims of the squared action difference.
ad::Tensor imitation_loss(const ad::Tensor& student_actions, const ad::Tensor& teacher_actions);

ad::Tensor student_loss(const ad::Tensor& imitation, const ad::Tensor& elbo, double lambda);

}  // namespace hpc::student
