#include "hpc/oracle/gae.hpp"

#include <cmath>

namespace hpc::oracle {

void RolloutBatch::resize(int envs, int steps, int obs_d, int act_d, int hidden) {
  num_envs = envs;
  horizon = steps;
  obs_dim = obs_d;
  act_dim = act_d;
  lstm_hidden = hidden;
  const size_t n = static_cast<size_t>(steps) * envs;
  obs.assign(n * obs_d, 0.0);
  actions.assign(n * act_d, 0.0);
  log_probs.assign(n, 0.0);
  rewards.assign(n, 0.0);
  values.assign(n, 0.0);
  done.assign(n, 0);
  boot_values.assign(n, 0.0);
  tail_values.assign(envs, 0.0);
  const size_t s = static_cast<size_t>(envs) * hidden;
  a_h0.assign(s, 0.0);
  a_c0.assign(s, 0.0);
  c_h0.assign(s, 0.0);
  c_c0.assign(s, 0.0);
  advantages.assign(n, 0.0);
  norm_advantages.assign(n, 0.0);
  returns.assign(n, 0.0);
}

void compute_gae(RolloutBatch& b, double gamma, double lambda) {
  for (int e = 0; e < b.num_envs; ++e) {
    double chain = 0.0;
    for (int t = b.horizon - 1; t >= 0; --t) {
      const size_t i = b.idx(t, e);
      double next_v;
      if (b.done[i]) {
        next_v = b.boot_values[i];  // zero at a true terminal
        chain = 0.0;
      } else if (t == b.horizon - 1) {
        next_v = b.tail_values[e];
      } else {
        next_v = b.values[b.idx(t + 1, e)];
      }
      const double delta = b.rewards[i] + gamma * next_v - b.values[i];
      chain = delta + gamma * lambda * chain;
      b.advantages[i] = chain;
      b.returns[i] = chain + b.values[i];
    }
  }
}

void normalize_advantages(RolloutBatch& b) {
  const size_t n = b.advantages.size();
  double mean = 0.0;
  for (double a : b.advantages) mean += a;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double a : b.advantages) var += (a - mean) * (a - mean);
  var /= static_cast<double>(n);
  const double inv = 1.0 / (std::sqrt(var) + 1e-8);
  for (size_t i = 0; i < n; ++i) b.norm_advantages[i] = (b.advantages[i] - mean) * inv;
}

}  // namespace hpc::oracle
