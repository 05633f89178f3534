#include "hpc/oracle/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "hpc/ad/checkpoint.hpp"
#include "hpc/common/io.hpp"
#include "hpc/common/log.hpp"
#include "hpc/common/parallel.hpp"
#include "hpc/envs/env.hpp"
#include "hpc/oracle/gae.hpp"
#include "hpc/oracle/ppo.hpp"

namespace hpc::oracle {

namespace fs = std::filesystem;
using ad::Tensor;

namespace {

struct TowerState {
  std::vector<double> h, c;  // [E*H] value buffers carried across steps
  TowerState(int e, int hidden)
      : h(static_cast<size_t>(e) * hidden, 0.0), c(h.size(), 0.0) {}

  void zero_row(int e, int hidden) {
    std::fill_n(h.begin() + static_cast<long>(e) * hidden, hidden, 0.0);
    std::fill_n(c.begin() + static_cast<long>(e) * hidden, hidden, 0.0);
  }
};

// one batched recurrent step outside the tape; writes outputs and the next
// state back into plain buffers
void tower_step(const Tower& tw, const Tensor& obs, TowerState& st, int rows, int hidden,
                std::vector<double>& out) {
  ad::NoGradGuard ng;
  ad::LstmState s{Tensor::from(st.h, {rows, hidden}), Tensor::from(st.c, {rows, hidden})};
  Tower::Out o = tw.forward(obs, s);
  auto ov = o.out.data();
  out.assign(ov.begin(), ov.end());
  auto hv = o.state.h.data();
  auto cv = o.state.c.data();
  std::copy(hv.begin(), hv.end(), st.h.begin());
  std::copy(cv.begin(), cv.end(), st.c.begin());
}

// peek values without advancing the carried state (bootstrap reads)
std::vector<double> tower_peek(const Tower& tw, const Tensor& obs, const std::vector<double>& h,
                               const std::vector<double>& c, int rows, int hidden) {
  ad::NoGradGuard ng;
  ad::LstmState s{Tensor::from(h, {rows, hidden}), Tensor::from(c, {rows, hidden})};
  Tower::Out o = tw.forward(obs, s);
  auto ov = o.out.data();
  return {ov.begin(), ov.end()};
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

TrainResult train_oracle(const config::RunConfig& cfg, uint64_t seed,
                         const std::string& out_dir, int workers) {
  const PpoConfig& pc = cfg.oracle.ppo;
  const int E = pc.num_envs;
  const int T = pc.horizon;
  const int H = cfg.oracle.nets.lstm_hidden;
  const int D = sim::kPrivilegedDim;
  const int A = kActionDim;

  fs::create_directories(fs::path(out_dir) / "checkpoints");

  Rng init_rng = Rng(seed).derive(1);
  OracleNets nets = OracleNets::create(cfg.oracle.nets, pc, init_rng);
  ad::Adam opt(nets.params.tensors(), pc.learning_rate);
  Rng action_rng = Rng(seed).derive(1000);
  Rng shuffle_rng = Rng(seed).derive(1001);

  envs::EnvOptions eopt;
  eopt.dynamics_randomization = false;  // stage one runs nominal physics
  eopt.noise_intensity = 0.0;
  eopt.start_level = 0;
  eopt.vx_lo = cfg.oracle.commands.vx_lo;
  eopt.vx_hi = cfg.oracle.commands.vx_hi;
  eopt.pitch_rate_cmd = cfg.oracle.commands.pitch_rate;

  std::vector<envs::Env> env;
  env.reserve(E);
  for (int e = 0; e < E; ++e) env.emplace_back(cfg, seed, e, eopt);

  WorkerPool pool(workers);

  TowerState actor_st(E, H), critic_st(E, H);
  RolloutBatch batch;
  batch.resize(E, T, D, A, H);

  CsvWriter csv(fs::path(out_dir) / "train_log.csv",
                {"iteration", "env_steps", "reward_mean", "ep_len_mean", "dist_mean",
                 "vel_err_mean", "ang_err_mean", "terrain_level", "policy_loss", "value_loss",
                 "entropy", "approx_kl", "grad_norm"});

  double reward_mean = 0.0, ep_len_mean = 0.0, dist_mean = 0.0;
  double vel_err_mean = 0.0, ang_err_mean = 0.0;

  std::vector<std::vector<double>> last_good;
  auto snapshot = [&] {
    last_good.clear();
    for (auto& t : nets.params.tensors()) {
      auto d = t.data();
      last_good.emplace_back(d.begin(), d.end());
    }
  };
  auto restore = [&] {
    auto ts = nets.params.tensors();
    for (size_t i = 0; i < ts.size(); ++i) {
      auto d = ts[i].data();
      std::copy(last_good[i].begin(), last_good[i].end(), d.begin());
    }
  };
  snapshot();

  TrainResult res;
  uint64_t env_steps = 0;

  std::vector<double> obs_buf(static_cast<size_t>(E) * D);
  std::vector<double> mean_buf, value_buf;
  std::vector<std::array<double, sim::kNumJoints>> acts(E);
  std::vector<envs::Env::StepResult> results(E);
  std::array<double, kActionDim> lsv{};

  auto gather_obs = [&] {
    pool.for_each(E, [&](int e) {
      auto p = env[e].privileged();
      std::copy(p.begin(), p.end(), obs_buf.begin() + static_cast<long>(e) * D);
    });
  };

  for (int iter = 0; iter < pc.iterations; ++iter) {
    std::copy(actor_st.h.begin(), actor_st.h.end(), batch.a_h0.begin());
    std::copy(actor_st.c.begin(), actor_st.c.end(), batch.a_c0.begin());
    std::copy(critic_st.h.begin(), critic_st.h.end(), batch.c_h0.begin());
    std::copy(critic_st.c.begin(), critic_st.c.end(), batch.c_c0.begin());
    std::fill(batch.done.begin(), batch.done.end(), 0);
    std::fill(batch.boot_values.begin(), batch.boot_values.end(), 0.0);

    {
      ad::NoGradGuard ng;
      // keep the tensor alive while we read its storage
      ad::Tensor cls = nets.clamped_log_std();
      auto v = cls.data();
      std::copy(v.begin(), v.end(), lsv.begin());
    }

    std::vector<double> fin_return, fin_len, fin_dist, fin_vel, fin_ang;

    for (int t = 0; t < T; ++t) {
      gather_obs();
      Tensor obs = Tensor::from(obs_buf, {E, D});
      tower_step(nets.actor, obs, actor_st, E, H, mean_buf);
      tower_step(nets.critic, obs, critic_st, E, H, value_buf);

      for (int e = 0; e < E; ++e) {
        const size_t i = batch.idx(t, e);
        std::copy_n(obs_buf.begin() + static_cast<long>(e) * D, D,
                    batch.obs.begin() + static_cast<long>(i) * D);
        batch.values[i] = value_buf[e];
        for (int j = 0; j < A; ++j) {
          const double a = mean_buf[e * A + j] + std::exp(lsv[j]) * action_rng.normal();
          batch.actions[i * A + j] = a;
          acts[e][j] = a;
        }
        batch.log_probs[i] = gaussian_log_prob_value(
            std::span<const double>(mean_buf.data() + e * A, A), lsv,
            std::span<const double>(batch.actions.data() + i * A, A));
      }

      pool.for_each(E, [&](int e) { results[e] = env[e].step(acts[e]); });
      env_steps += static_cast<uint64_t>(E);

      std::vector<int> timeouts;
      for (int e = 0; e < E; ++e) {
        const size_t i = batch.idx(t, e);
        batch.rewards[i] = results[e].reward;
        if (!results[e].done) continue;
        batch.done[i] = 1;
        const envs::EpisodeStats& st = env[e].finished_stats();
        fin_return.push_back(st.reward_return);
        fin_len.push_back(st.steps);
        fin_dist.push_back(st.walked);
        fin_vel.push_back(st.mean_vel_err());
        fin_ang.push_back(st.mean_ang_err());
        if (results[e].termination == sim::Termination::kTimeout) timeouts.push_back(e);
      }

      if (!timeouts.empty()) {
        const int m = static_cast<int>(timeouts.size());
        std::vector<double> fo(static_cast<size_t>(m) * D), fh(static_cast<size_t>(m) * H),
            fc(fh.size());
        for (int k = 0; k < m; ++k) {
          auto f = env[timeouts[k]].final_privileged();
          std::copy(f.begin(), f.end(), fo.begin() + static_cast<long>(k) * D);
          std::copy_n(critic_st.h.begin() + static_cast<long>(timeouts[k]) * H, H,
                      fh.begin() + static_cast<long>(k) * H);
          std::copy_n(critic_st.c.begin() + static_cast<long>(timeouts[k]) * H, H,
                      fc.begin() + static_cast<long>(k) * H);
        }
        std::vector<double> v =
            tower_peek(nets.critic, Tensor::from(fo, {m, D}), fh, fc, m, H);
        for (int k = 0; k < m; ++k) batch.boot_values[batch.idx(t, timeouts[k])] = v[k];
      }

      for (int e = 0; e < E; ++e) {
        if (results[e].done) {
          actor_st.zero_row(e, H);
          critic_st.zero_row(e, H);
        }
      }
    }

    gather_obs();
    {
      std::vector<double> v = tower_peek(nets.critic, Tensor::from(obs_buf, {E, D}),
                                         critic_st.h, critic_st.c, E, H);
      std::copy(v.begin(), v.end(), batch.tail_values.begin());
    }

    compute_gae(batch, pc.gamma, pc.gae_lambda);
    normalize_advantages(batch);
    PpoUpdateStats us = ppo_update(nets, opt, batch, pc, shuffle_rng);

    bool finite = !us.aborted;
    if (finite) {
      for (auto& t : nets.params.tensors()) {
        for (double x : t.data()) {
          if (!std::isfinite(x)) {
            finite = false;
            break;
          }
        }
        if (!finite) break;
      }
    }

    if (!fin_return.empty()) {
      reward_mean = mean_of(fin_return);
      ep_len_mean = mean_of(fin_len);
      dist_mean = mean_of(fin_dist);
      vel_err_mean = mean_of(fin_vel);
      ang_err_mean = mean_of(fin_ang);
    }
    double level_mean = 0.0;
    for (int e = 0; e < E; ++e) level_mean += env[e].level();
    level_mean /= E;

    csv.write_row({static_cast<double>(iter + 1), static_cast<double>(env_steps), reward_mean,
                   ep_len_mean, dist_mean, vel_err_mean, ang_err_mean, level_mean,
                   us.policy_loss, us.value_loss, us.entropy, us.approx_kl, us.grad_norm});

    res.iterations = iter + 1;
    res.last_reward_mean = reward_mean;
    res.last_dist_mean = dist_mean;

    if (!finite) {
      log_error("update produced non-finite parameters at iteration " +
                 std::to_string(iter + 1) + "; keeping last good parameters");
      restore();
      res.aborted = true;
      break;
    }
    snapshot();

    if (pc.checkpoint_every > 0 && (iter + 1) % pc.checkpoint_every == 0 &&
        iter + 1 < pc.iterations) {
      char name[32];
      std::snprintf(name, sizeof(name), "oracle_%06d.ckpt", iter + 1);
      ad::save_checkpoint(fs::path(out_dir) / "checkpoints" / name, nets.params,
                          kOracleCheckpointKind);
    }
    if ((iter + 1) % 10 == 0 || iter == 0) {
      log_info("iter " + std::to_string(iter + 1) + " reward " + std::to_string(reward_mean) +
                " dist " + std::to_string(dist_mean) + " level " + std::to_string(level_mean));
    }
  }

  ad::save_checkpoint(fs::path(out_dir) / "oracle.ckpt", nets.params, kOracleCheckpointKind);
  csv.flush();
  return res;
}

}  // namespace hpc::oracle
