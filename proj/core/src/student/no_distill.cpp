#include "hpc/student/no_distill.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <vector>

#include "json.hpp"

#include "hpc/ad/adam.hpp"
#include "hpc/ad/checkpoint.hpp"
#include "hpc/common/io.hpp"
#include "hpc/common/log.hpp"
#include "hpc/common/parallel.hpp"
#include "hpc/envs/env.hpp"
#include "hpc/noise/matern.hpp"
#include "hpc/oracle/gae.hpp"
#include "hpc/oracle/nets.hpp"
#include "hpc/student/losses.hpp"
#include "hpc/student/train.hpp"

namespace hpc::student {

namespace fs = std::filesystem;
using ad::Tensor;
using nlohmann::json;

namespace {

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

}  // namespace

NoDistillTrainResult train_no_distill(const config::RunConfig& cfg, uint64_t seed,
                                      const std::string& out_dir, int workers) {
  const StudentTrainConfig& sc = cfg.student;
  const oracle::PpoConfig& pc = cfg.oracle.ppo;
  const int E = pc.num_envs;
  const int T = pc.horizon;
  const int H = sc.window;
  const int F = kFrameDim;
  const int A = kActionDim;
  const int WD = H * F;  // one flattened window
  const int N = E * T;

  Rng root(seed);
  Rng init_rng = root.derive(1);
  Rng action_rng = root.derive(4000);
  Rng shuffle_rng = root.derive(4001);
  Rng eta_rng = root.derive(4002);

  StudentNets nets = StudentNets::create(sc, Variant::kNoDistill, init_rng);
  ad::Adam opt(nets.params.tensors(), pc.learning_rate);

  envs::EnvOptions eopt;
  eopt.dynamics_randomization = true;
  eopt.noise_intensity = sc.train_intensity;
  eopt.gp_length_scale = cfg.noise.scan.gp.length_scale_start;
  eopt.vx_lo = cfg.oracle.commands.vx_lo;
  eopt.vx_hi = cfg.oracle.commands.vx_hi;
  eopt.pitch_rate_cmd = cfg.oracle.commands.pitch_rate;

  std::vector<envs::Env> env;
  env.reserve(E);
  for (int e = 0; e < E; ++e) env.emplace_back(cfg, seed, e, eopt);

  WorkerPool pool(workers);

  // rolling corrupted-observation windows, oldest frame first
  std::vector<std::vector<double>> windows(E, std::vector<double>(WD, 0.0));
  auto push_frame = [&](int e, std::span<const double, sim::kStudentDim> frame) {
    auto& w = windows[e];
    std::copy(w.begin() + F, w.end(), w.begin());
    std::copy(frame.begin(), frame.end(), w.end() - F);
  };
  for (int e = 0; e < E; ++e) push_frame(e, env[e].student());

  oracle::RolloutBatch batch;
  batch.resize(E, T, WD, A, 1);
  std::vector<double> targets(static_cast<size_t>(N) * sim::kReconDim);

  const fs::path out(out_dir);
  fs::create_directories(out / "checkpoints");
  CsvWriter csv(out / "metrics.csv",
                {"iteration", "env_steps", "reward_mean", "ep_len_mean", "dist_mean",
                 "terrain_level", "policy_loss", "value_loss", "entropy", "approx_kl", "recon",
                 "kl", "beta", "grad_norm"});

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

  // batched deterministic policy/value on window-major [B * WD] buffers
  std::vector<double> tm;
  auto eval_windows = [&](const double* wins, int B, std::vector<double>* means,
                          std::vector<double>* values) {
    ad::NoGradGuard ng;
    tm.resize(static_cast<size_t>(B) * WD);
    for (int b = 0; b < B; ++b) {
      for (int t = 0; t < H; ++t) {
        std::copy_n(wins + (static_cast<size_t>(b) * H + t) * F, F,
                    tm.data() + (static_cast<size_t>(t) * B + b) * F);
      }
    }
    EncodeOut enc = nets.encode(Tensor::from(tm, {H * B, F}), B, false, nullptr);
    if (means) {
      Tensor a = nets.act(enc.z);
      auto m = a.data();
      means->assign(m.begin(), m.end());
    }
    if (values) {
      Tensor val = nets.value(enc.z);
      auto v = val.data();
      values->assign(v.begin(), v.end());
    }
  };

  NoDistillTrainResult res;
  uint64_t env_steps = 0;
  int64_t update_count = 0;
  double reward_mean = 0.0, ep_len_mean = 0.0, dist_mean = 0.0;
  std::vector<double> mean_buf, value_buf;
  std::vector<std::array<double, sim::kNumJoints>> acts(E);
  std::vector<envs::Env::StepResult> results(E);
  std::array<double, kActionDim> lsv{};
  std::vector<double> tail_wins(static_cast<size_t>(E) * WD);
  std::vector<int> order(N);

  for (int iter = 0; iter < pc.iterations; ++iter) {
    const double ls_now = noise::length_scale_at(cfg.noise.scan.gp, update_count);
    for (auto& e : env) e.set_gp_length_scale(ls_now);

    std::fill(batch.done.begin(), batch.done.end(), 0);
    std::fill(batch.boot_values.begin(), batch.boot_values.end(), 0.0);
    {
      ad::NoGradGuard ng;
      // keep the tensor alive while we read its storage
      Tensor cls = nets.clamped_log_std();
      auto v = cls.data();
      std::copy(v.begin(), v.end(), lsv.begin());
    }

    std::vector<double> fin_return, fin_len, fin_dist;
    std::vector<size_t> boot_at;
    std::vector<double> boot_wins;

    for (int t = 0; t < T; ++t) {
      for (int e = 0; e < E; ++e) {
        std::copy(windows[e].begin(), windows[e].end(),
                  batch.obs.begin() + static_cast<long>(batch.idx(t, e)) * WD);
      }
      eval_windows(batch.obs.data() + static_cast<size_t>(t) * E * WD, E, &mean_buf, &value_buf);

      for (int e = 0; e < E; ++e) {
        const size_t i = batch.idx(t, e);
        batch.values[i] = value_buf[e];
        for (int j = 0; j < A; ++j) {
          const double a = mean_buf[e * A + j] + std::exp(lsv[j]) * action_rng.normal();
          batch.actions[i * A + j] = a;
          acts[e][j] = a;
        }
        batch.log_probs[i] = oracle::gaussian_log_prob_value(
            std::span<const double>(mean_buf.data() + e * A, A), lsv,
            std::span<const double>(batch.actions.data() + i * A, A));
        auto rt = env[e].recon_target();
        std::copy(rt.begin(), rt.end(), targets.begin() + i * sim::kReconDim);
      }

      pool.for_each(E, [&](int e) { results[e] = env[e].step(acts[e]); });
      env_steps += static_cast<uint64_t>(E);

      for (int e = 0; e < E; ++e) {
        const size_t i = batch.idx(t, e);
        batch.rewards[i] = results[e].reward;
        if (!results[e].done) {
          push_frame(e, env[e].student());
          continue;
        }
        batch.done[i] = 1;
        const envs::EpisodeStats& st = env[e].finished_stats();
        fin_return.push_back(st.reward_return);
        fin_len.push_back(st.steps);
        fin_dist.push_back(st.walked);
        if (results[e].termination == sim::Termination::kTimeout) {
          // value of the cut state: the window advanced by the final obs
          boot_at.push_back(i);
          const size_t off = boot_wins.size();
          boot_wins.resize(off + WD);
          std::copy(windows[e].begin() + F, windows[e].end(),
                    boot_wins.begin() + static_cast<long>(off));
          auto f = env[e].final_student();
          std::copy(f.begin(), f.end(), boot_wins.begin() + static_cast<long>(off + WD - F));
        }
        std::fill(windows[e].begin(), windows[e].end(), 0.0);
        push_frame(e, env[e].student());
      }
    }

    if (!boot_at.empty()) {
      eval_windows(boot_wins.data(), static_cast<int>(boot_at.size()), nullptr, &value_buf);
      for (size_t k = 0; k < boot_at.size(); ++k) batch.boot_values[boot_at[k]] = value_buf[k];
    }
    for (int e = 0; e < E; ++e) {
      std::copy(windows[e].begin(), windows[e].end(),
                tail_wins.begin() + static_cast<long>(e) * WD);
    }
    eval_windows(tail_wins.data(), E, nullptr, &value_buf);
    std::copy(value_buf.begin(), value_buf.end(), batch.tail_values.begin());

    compute_gae(batch, pc.gamma, pc.gae_lambda);
    normalize_advantages(batch);

    double it_policy = 0.0, it_value = 0.0, it_entropy = 0.0, it_kl = 0.0, it_gn = 0.0;
    double it_recon = 0.0, it_kldiv = 0.0, beta_last = 0.0;
    int mb_updates = 0;
    bool update_aborted = false;

    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < pc.epochs && !update_aborted; ++epoch) {
      for (int i = N - 1; i > 0; --i) std::swap(order[i], order[shuffle_rng.uniform_int(0, i)]);
      for (int g = 0; g < pc.minibatches && !update_aborted; ++g) {
        const int begin = static_cast<int>(static_cast<int64_t>(g) * N / pc.minibatches);
        const int end = static_cast<int>(static_cast<int64_t>(g + 1) * N / pc.minibatches);
        const int K = end - begin;
        if (K <= 0) continue;
        const double beta = beta_schedule(update_count, sc);
        beta_last = beta;

        std::vector<double> w_tm(static_cast<size_t>(K) * WD);
        std::vector<double> act_d(static_cast<size_t>(K) * A), old_d(K), adv_d(K), ret_d(K);
        std::vector<double> tgt_d(static_cast<size_t>(K) * sim::kReconDim);
        for (int k = 0; k < K; ++k) {
          const size_t i = static_cast<size_t>(order[begin + k]);
          const double* w = batch.obs.data() + i * WD;
          for (int t = 0; t < H; ++t) {
            std::copy_n(w + static_cast<size_t>(t) * F, F,
                        w_tm.data() + (static_cast<size_t>(t) * K + k) * F);
          }
          std::copy_n(batch.actions.data() + i * A, A, act_d.data() + static_cast<size_t>(k) * A);
          old_d[k] = batch.log_probs[i];
          adv_d[k] = batch.norm_advantages[i];
          ret_d[k] = batch.returns[i];
          std::copy_n(targets.data() + i * sim::kReconDim, sim::kReconDim,
                      tgt_d.data() + static_cast<size_t>(k) * sim::kReconDim);
        }

        Tensor W = Tensor::from(std::move(w_tm), {H * K, F});
        Tensor actions = Tensor::from(std::move(act_d), {K, A});
        Tensor old_logp = Tensor::from(std::move(old_d), {K, 1});
        Tensor advs = Tensor::from(std::move(adv_d), {K, 1});
        Tensor rets = Tensor::from(std::move(ret_d), {K, 1});
        Tensor tgts = Tensor::from(std::move(tgt_d), {K, sim::kReconDim});

        EncodeOut enc = nets.encode(W, K, true, &eta_rng);
        Tensor means = nets.act(enc.mu);
        Tensor values = nets.value(enc.mu);
        Tensor ls = nets.clamped_log_std();
        Tensor logp = oracle::gaussian_log_prob(means, ls, actions);
        Tensor logratio = ad::sub(logp, old_logp);
        Tensor ratio = ad::exp(logratio);
        Tensor surr1 = ad::mul(ratio, advs);
        Tensor surr2 =
            ad::mul(ad::clamp(ratio, 1.0 - pc.clip_ratio, 1.0 + pc.clip_ratio), advs);
        Tensor policy_loss = ad::neg(ad::mean(ad::minimum(surr1, surr2)));
        Tensor value_loss = ad::mean(ad::square(ad::sub(values, rets)));
        Tensor entropy = oracle::gaussian_entropy(ls);
        ElboParts parts = elbo_loss(nets, enc, tgts, beta);
        Tensor loss = ad::add(ad::add(policy_loss, ad::mul_scalar(value_loss, pc.value_coef)),
                              ad::mul_scalar(entropy, -pc.entropy_coef));
        loss = ad::add(loss, ad::mul_scalar(parts.loss, sc.lambda_elbo));

        if (!ad::all_finite(loss)) {
          update_aborted = true;
          break;
        }

        nets.params.zero_grad();
        ad::backward(loss);
        it_gn += ad::clip_grad_norm(nets.params.tensors(), pc.max_grad_norm);
        opt.step();
        ++update_count;

        double kl = 0.0;
        for (double d : logratio.data()) kl += std::exp(d) - 1.0 - d;
        it_kl += kl / static_cast<double>(K);
        it_policy += policy_loss.item();
        it_value += value_loss.item();
        it_entropy += entropy.item();
        it_recon += parts.recon_mse_total;
        it_kldiv += parts.kl;
        mb_updates += 1;
      }
    }

    bool finite = !update_aborted;
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

    if (mb_updates > 0) {
      const double inv = 1.0 / mb_updates;
      it_policy *= inv;
      it_value *= inv;
      it_entropy *= inv;
      it_kl *= inv;
      it_gn *= inv;
      it_recon *= inv;
      it_kldiv *= inv;
    }
    if (!fin_return.empty()) {
      reward_mean = mean_of(fin_return);
      ep_len_mean = mean_of(fin_len);
      dist_mean = mean_of(fin_dist);
    }
    double level_mean = 0.0;
    for (int e = 0; e < E; ++e) level_mean += env[e].level();
    level_mean /= E;

    csv.write_row({static_cast<double>(iter + 1), static_cast<double>(env_steps), reward_mean,
                   ep_len_mean, dist_mean, level_mean, it_policy, it_value, it_entropy, it_kl,
                   it_recon, it_kldiv, beta_last, it_gn});

    res.iterations = iter + 1;
    res.updates = static_cast<int>(update_count);
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
      char name[48];
      std::snprintf(name, sizeof(name), "no_distill_%06d.ckpt", iter + 1);
      ad::save_checkpoint(out / "checkpoints" / name, nets.params,
                          checkpoint_kind(Variant::kNoDistill));
    }
    if ((iter + 1) % 10 == 0 || iter == 0) {
      log_info("iter " + std::to_string(iter + 1) + " reward " + std::to_string(reward_mean) +
               " dist " + std::to_string(dist_mean) + " level " + std::to_string(level_mean));
    }
  }

  ad::save_checkpoint(out / checkpoint_filename(Variant::kNoDistill), nets.params,
                      checkpoint_kind(Variant::kNoDistill));
  csv.flush();

  json summary = {{"iterations", res.iterations}, {"updates", res.updates},
                  {"env_steps", env_steps},       {"aborted", res.aborted},
                  {"last_reward_mean", res.last_reward_mean},
                  {"last_dist_mean", res.last_dist_mean}};
  write_text_file(out / "train_summary.json", summary.dump(2) + "\n");
  return res;
}

}  // namespace hpc::student
