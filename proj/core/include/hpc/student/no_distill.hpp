#pragma once

#include <string>

#include "hpc/config/config.hpp"

namespace hpc::student {

struct NoDistillTrainResult {
  int iterations = 0;
  int updates = 0;  // minibatch updates; clocks beta and the noise ramp
  bool aborted = false;
  double last_reward_mean = 0.0;
  double last_dist_mean = 0.0;
};

// On-policy ablation: the student architecture trained from scratch with
// the clipped surrogate objective under sensor corruption, keeping the
// reconstruction ELBO as an auxiliary loss. No teacher is involved, so the
// run logs PPO losses instead of an imitation loss. Windows are
// self-contained, which lets minibatches be drawn at step level.
NoDistillTrainResult train_no_distill(const config::RunConfig& cfg, uint64_t seed,
                                      const std::string& out_dir, int workers);

}  // namespace hpc::student
