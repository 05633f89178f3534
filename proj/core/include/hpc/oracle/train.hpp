#pragma once

#include <string>

#include "hpc/config/config.hpp"
#include "hpc/oracle/nets.hpp"

namespace hpc::oracle {

struct TrainResult {
  int iterations = 0;
  bool aborted = false;          // non-finite update; last good params kept
  double last_reward_mean = 0.0;
  double last_dist_mean = 0.0;
};

// Stage one: PPO on privileged observations over nominal physics (no sensor
// corruption, no dynamics randomization). Writes train_log.csv, periodic
// checkpoints under <out>/checkpoints/ and the final <out>/oracle.ckpt.
TrainResult train_oracle(const config::RunConfig& cfg, uint64_t seed,
                         const std::string& out_dir, int workers);

}  // namespace hpc::oracle
