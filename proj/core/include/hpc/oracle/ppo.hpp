#pragma once

#include "hpc/ad/adam.hpp"
#include "hpc/oracle/gae.hpp"
#include "hpc/oracle/nets.hpp"

namespace hpc::oracle {

struct PpoUpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double grad_norm = 0.0;
  int minibatch_updates = 0;
  bool aborted = false;  // non-finite loss; remaining minibatches skipped
};

// Clipped-surrogate update over the batch: epochs x minibatches, where a
// minibatch is a group of whole env sequences replayed through the LSTM
// (recurrent state zeroed at episode boundaries, as during the rollout).
PpoUpdateStats ppo_update(OracleNets& nets, ad::Adam& opt, const RolloutBatch& batch,
                          const PpoConfig& cfg, Rng& shuffle_rng);

}  // namespace hpc::oracle
