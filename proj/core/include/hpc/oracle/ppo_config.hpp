#pragma once

#include <vector>

namespace hpc::oracle {

struct PpoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_ratio = 0.2;
  int epochs = 4;
  int minibatches = 4;  // must divide num_envs; sequences stay whole
  double entropy_coef = 0.005;
  double value_coef = 0.5;
  double learning_rate = 3e-4;
  int num_envs = 64;
  int horizon = 128;
  double max_grad_norm = 1.0;
  int iterations = 1500;
  int checkpoint_every = 200;
  double log_std_init = -1.0;
  double log_std_lo = -4.0;
  double log_std_hi = 1.0;
};

struct OracleNetsConfig {
  int encoder_hidden = 64;
  int d_e = 16;        // terrain feature width
  int lstm_hidden = 128;
  std::vector<int> head_hidden{128, 64};
};

struct CommandConfig {
  double vx_lo = 0.3;
  double vx_hi = 0.9;
  double pitch_rate = 0.0;
};

}  // namespace hpc::oracle
