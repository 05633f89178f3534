#include "hpc/oracle/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace hpc::oracle {

using ad::Tensor;

namespace {

// rows of src (one per env id, width w) gathered into a [K, w] constant
Tensor gather_rows(const std::vector<double>& src, const std::vector<int>& envs, int w) {
  std::vector<double> d(envs.size() * w);
  for (size_t k = 0; k < envs.size(); ++k)
    for (int j = 0; j < w; ++j) d[k * w + j] = src[static_cast<size_t>(envs[k]) * w + j];
  return Tensor::from(std::move(d), {static_cast<int>(envs.size()), w});
}

}  // namespace

PpoUpdateStats ppo_update(OracleNets& nets, ad::Adam& opt, const RolloutBatch& batch,
                          const PpoConfig& cfg, Rng& shuffle_rng) {
  const int E = batch.num_envs;
  const int T = batch.horizon;
  const int D = batch.obs_dim;
  const int A = batch.act_dim;
  const int H = batch.lstm_hidden;
  const int groups = cfg.minibatches;
  const int K = E / groups;

  PpoUpdateStats stats;
  std::vector<int> perm(E);
  std::iota(perm.begin(), perm.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int i = E - 1; i > 0; --i) {
      const int j = static_cast<int>(shuffle_rng.uniform_int(0, i));
      std::swap(perm[i], perm[j]);
    }
    for (int g = 0; g < groups; ++g) {
      std::vector<int> envs(perm.begin() + static_cast<size_t>(g) * K,
                            perm.begin() + static_cast<size_t>(g + 1) * K);

      ad::LstmState as{gather_rows(batch.a_h0, envs, H), gather_rows(batch.a_c0, envs, H)};
      ad::LstmState cs{gather_rows(batch.c_h0, envs, H), gather_rows(batch.c_c0, envs, H)};

      std::vector<Tensor> mean_steps, value_steps;
      mean_steps.reserve(T);
      value_steps.reserve(T);
      for (int t = 0; t < T; ++t) {
        std::vector<double> od(static_cast<size_t>(K) * D);
        bool any_done = false;
        for (int k = 0; k < K; ++k) {
          const size_t i = batch.idx(t, envs[k]);
          std::copy_n(batch.obs.begin() + static_cast<long>(i) * D, D, od.begin() + static_cast<long>(k) * D);
          any_done = any_done || batch.done[i];
        }
        Tensor obs = Tensor::from(std::move(od), {K, D});
        Tower::Out ao = nets.actor.forward(obs, as);
        Tower::Out co = nets.critic.forward(obs, cs);
        mean_steps.push_back(ao.out);
        value_steps.push_back(co.out);
        as = ao.state;
        cs = co.state;
        if (any_done) {
          // zero the recurrent state through the graph, as the rollout did
          std::vector<double> m(static_cast<size_t>(K) * H, 1.0);
          for (int k = 0; k < K; ++k)
            if (batch.done[batch.idx(t, envs[k])])
              std::fill_n(m.begin() + static_cast<long>(k) * H, H, 0.0);
          Tensor mask = Tensor::from(std::move(m), {K, H});
          as = {ad::mul(as.h, mask), ad::mul(as.c, mask)};
          cs = {ad::mul(cs.h, mask), ad::mul(cs.c, mask)};
        }
      }

      Tensor means = ad::concat(std::span<const Tensor>(mean_steps.data(), mean_steps.size()), 0);
      Tensor values = ad::concat(std::span<const Tensor>(value_steps.data(), value_steps.size()), 0);

      // constants in the same row order t*K + k
      const size_t n = static_cast<size_t>(T) * K;
      std::vector<double> act_d(n * A), old_d(n), adv_d(n), ret_d(n);
      for (int t = 0; t < T; ++t) {
        for (int k = 0; k < K; ++k) {
          const size_t i = batch.idx(t, envs[k]);
          const size_t r = static_cast<size_t>(t) * K + k;
          for (int j = 0; j < A; ++j) act_d[r * A + j] = batch.actions[i * A + j];
          old_d[r] = batch.log_probs[i];
          adv_d[r] = batch.norm_advantages[i];
          ret_d[r] = batch.returns[i];
        }
      }
      Tensor actions = Tensor::from(std::move(act_d), {static_cast<int>(n), A});
      Tensor old_logp = Tensor::from(std::move(old_d), {static_cast<int>(n), 1});
      Tensor advs = Tensor::from(std::move(adv_d), {static_cast<int>(n), 1});
      Tensor rets = Tensor::from(std::move(ret_d), {static_cast<int>(n), 1});

      Tensor ls = nets.clamped_log_std();
      Tensor logp = gaussian_log_prob(means, ls, actions);
      Tensor logratio = ad::sub(logp, old_logp);
      Tensor ratio = ad::exp(logratio);
      Tensor surr1 = ad::mul(ratio, advs);
      Tensor surr2 = ad::mul(ad::clamp(ratio, 1.0 - cfg.clip_ratio, 1.0 + cfg.clip_ratio), advs);
      Tensor policy_loss = ad::neg(ad::mean(ad::minimum(surr1, surr2)));
      Tensor value_loss = ad::mean(ad::square(ad::sub(values, rets)));
      Tensor entropy = gaussian_entropy(ls);
      Tensor loss = ad::add(ad::add(policy_loss, ad::mul_scalar(value_loss, cfg.value_coef)),
                            ad::mul_scalar(entropy, -cfg.entropy_coef));

      if (!ad::all_finite(loss)) {
        stats.aborted = true;
        goto done;
      }

      nets.params.zero_grad();
      ad::backward(loss);
      stats.grad_norm += ad::clip_grad_norm(nets.params.tensors(), cfg.max_grad_norm);
      opt.step();

      double kl = 0.0;
      for (double d : logratio.data()) kl += std::exp(d) - 1.0 - d;
      stats.approx_kl += kl / static_cast<double>(n);
      stats.policy_loss += policy_loss.item();
      stats.value_loss += value_loss.item();
      stats.entropy += entropy.item();
      stats.minibatch_updates += 1;
    }
  }

done:
  if (stats.minibatch_updates > 0) {
    const double inv = 1.0 / stats.minibatch_updates;
    stats.policy_loss *= inv;
    stats.value_loss *= inv;
    stats.entropy *= inv;
    stats.approx_kl *= inv;
    stats.grad_norm *= inv;
  }
  return stats;
}

}  // namespace hpc::oracle
