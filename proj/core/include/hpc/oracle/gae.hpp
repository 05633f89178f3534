#pragma once

#include <cstdint>
#include <vector>

namespace hpc::oracle {

// One on-policy rollout, time-major: index (t, e) = t * num_envs + e.
// done[t,e] marks an episode boundary after step t. boot_values carries
// V(s_final) when that boundary was a timeout (the episode was cut, not
// finished), zero for a true terminal. tail_values bootstraps the
// unfinished tail at t = horizon.
struct RolloutBatch {
  int num_envs = 0;
  int horizon = 0;
  int obs_dim = 0;
  int act_dim = 0;
  int lstm_hidden = 0;

  std::vector<double> obs;         // [T*E*obs_dim]
  std::vector<double> actions;     // [T*E*act_dim], pre-clip samples
  std::vector<double> log_probs;   // [T*E]
  std::vector<double> rewards;     // [T*E]
  std::vector<double> values;      // [T*E]
  std::vector<uint8_t> done;       // [T*E]
  std::vector<double> boot_values; // [T*E]
  std::vector<double> tail_values; // [E]

  // recurrent state snapshots taken before step 0, per tower
  std::vector<double> a_h0, a_c0, c_h0, c_c0;  // [E*lstm_hidden]

  // filled by compute_gae / normalize_advantages
  std::vector<double> advantages;
  std::vector<double> norm_advantages;
  std::vector<double> returns;  // advantages + values

  void resize(int envs, int steps, int obs_d, int act_d, int hidden);
  size_t idx(int t, int e) const {
    return static_cast<size_t>(t) * num_envs + e;
  }
};

void compute_gae(RolloutBatch& b, double gamma, double lambda);
void normalize_advantages(RolloutBatch& b);

}  // namespace hpc::oracle
