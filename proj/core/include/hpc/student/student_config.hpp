#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hpc::student {

// Distillation variants. kNoWorldModel keeps the recurrent encoder but
// drops the latent bottleneck and decoder; kNoDistill trains the full
// architecture with PPO plus the reconstruction loss instead of imitation.
enum class Variant { kFull, kNoWorldModel, kNoDistill };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct StudentTrainConfig {
  int window = 16;          // H frames per encode
  int d_z = 32;             // latent width
  int lstm_hidden = 128;    // per direction
  int encoder_hidden = 64;  // terrain feature MLP
  int d_e = 16;
  std::vector<int> decoder_hidden{128};
  std::vector<int> policy_hidden{128, 64};

  double lambda_elbo = 0.5;
  double beta_base = 0.01;
  double beta_slope = 1e-5;  // per update
  double beta_cap = 0.5;
  double log_sigma_lo = -5.0;
  double log_sigma_hi = 2.0;

  double learning_rate = 1e-3;
  int minibatch = 256;
  int updates_per_round_scale = 4;  // updates = scale * new_steps / minibatch
  int num_envs = 16;                // parallel collection envs
  int steps_per_round = 4096;
  int rounds = 60;
  int64_t buffer_capacity = 2000000;  // steps
  double max_grad_norm = 1.0;
  bool stop_policy_gradient_to_encoder = false;
  int checkpoint_every_rounds = 10;
  double train_intensity = 1.0;
};

}  // namespace hpc::student
