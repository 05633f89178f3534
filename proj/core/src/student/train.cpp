#include "hpc/student/train.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "hpc/ad/adam.hpp"
#include "hpc/ad/checkpoint.hpp"
#include "hpc/common/io.hpp"
#include "hpc/common/log.hpp"
#include "hpc/common/parallel.hpp"
#include "hpc/noise/matern.hpp"
#include "hpc/student/buffer.hpp"
#include "hpc/student/dagger.hpp"
#include "hpc/student/losses.hpp"

namespace hpc::student {

namespace fs = std::filesystem;
using nlohmann::json;

std::string checkpoint_filename(Variant v) {
  switch (v) {
    case Variant::kFull: return "student.ckpt";
    case Variant::kNoWorldModel: return "student_no_wm.ckpt";
    case Variant::kNoDistill: return "student_no_distill.ckpt";
  }
  return "student.ckpt";
}

namespace {

// Gathers minibatch windows into one time-major tensor batch: frame t of
// window b lands at row t*batch + b.
struct WindowBatch {
  std::vector<double> frames;   // [window * batch * kFrameDim]
  std::vector<double> actions;  // [batch * kActionDim]
  std::vector<double> targets;  // [batch * kReconDim]
  std::vector<double> scratch;  // one window

  void gather(const DaggerBuffer& buffer, const std::vector<DaggerBuffer::Ref>& refs,
              int window) {
    const int b = static_cast<int>(refs.size());
    frames.assign(static_cast<size_t>(window) * b * kFrameDim, 0.0);
    actions.resize(static_cast<size_t>(b) * kActionDim);
    targets.resize(static_cast<size_t>(b) * sim::kReconDim);
    scratch.resize(static_cast<size_t>(window) * kFrameDim);
    for (int i = 0; i < b; ++i) {
      buffer.fill_window(refs[i], scratch.data());
      for (int t = 0; t < window; ++t) {
        std::copy_n(scratch.data() + static_cast<size_t>(t) * kFrameDim, kFrameDim,
                    frames.data() + (static_cast<size_t>(t) * b + i) * kFrameDim);
      }
      std::copy_n(buffer.teacher_action(refs[i]), kActionDim,
                  actions.data() + static_cast<size_t>(i) * kActionDim);
      std::copy_n(buffer.target(refs[i]), sim::kReconDim,
                  targets.data() + static_cast<size_t>(i) * sim::kReconDim);
    }
  }
};

double mean_of(const std::vector<double>& v, size_t begin, size_t end) {
  if (end <= begin) return 0.0;
  return std::accumulate(v.begin() + begin, v.begin() + end, 0.0) / (end - begin);
}

}  // namespace

StudentTrainResult train_student(const config::RunConfig& cfg, Variant variant,
                                 const fs::path& teacher_ckpt, uint64_t seed,
                                 const std::string& out_dir, int workers) {
  if (variant == Variant::kNoDistill) {
    throw std::invalid_argument("train_student: the no_distill variant trains on-policy");
  }
  const StudentTrainConfig& sc = cfg.student;
  const int H = sc.window;
  const int E = sc.num_envs;

  Rng root(seed);
  Rng init_rng = root.derive(1);
  Rng eta_rng = root.derive(3000);
  Rng sample_rng = root.derive(3001);
  Rng probe_rng = root.derive(3002);

  StudentNets nets = StudentNets::create(sc, variant, init_rng);
  TeacherPolicy teacher = TeacherPolicy::load(teacher_ckpt, cfg, E);
  ad::Adam opt(nets.params.tensors(), sc.learning_rate);

  envs::EnvOptions eopt;
  eopt.dynamics_randomization = true;
  eopt.noise_intensity = sc.train_intensity;
  eopt.gp_length_scale = cfg.noise.scan.gp.length_scale_start;
  eopt.vx_lo = cfg.oracle.commands.vx_lo;
  eopt.vx_hi = cfg.oracle.commands.vx_hi;
  eopt.pitch_rate_cmd = cfg.oracle.commands.pitch_rate;

  DaggerCollector collector(cfg, seed, eopt, E, H);
  DaggerBuffer buffer(sc.buffer_capacity, H);
  WorkerPool pool(workers);

  const fs::path out(out_dir);
  fs::create_directories(out / "checkpoints");
  CsvWriter csv(out / "metrics.csv",
                {"update", "imitation_loss", "recon_mse_total", "recon_mse_scan", "kl", "beta"});

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

  StudentTrainResult res;
  std::vector<double> imitation_hist;
  std::vector<DaggerBuffer::Ref> refs;
  WindowBatch mb;
  int64_t update_count = 0;
  auto params_vec = nets.params.tensors();

  for (int round = 0; round < sc.rounds && !res.aborted; ++round) {
    collector.set_gp_length_scale(noise::length_scale_at(cfg.noise.scan.gp, update_count));
    DaggerRoundStats stats = collector.collect(nets, teacher, buffer, sc.steps_per_round, pool);
    res.steps_collected += stats.new_steps;

    const int64_t n_updates = std::max<int64_t>(
        1, sc.updates_per_round_scale * stats.new_steps / sc.minibatch);
    snapshot();

    double imit_val = 0.0;
    for (int64_t u = 0; u < n_updates; ++u) {
      const double beta = beta_schedule(update_count, sc);
      const int B = static_cast<int>(std::min<int64_t>(sc.minibatch, buffer.size_steps()));
      refs.clear();
      for (int i = 0; i < B; ++i) refs.push_back(buffer.sample(sample_rng));
      mb.gather(buffer, refs, H);

      ad::Tensor windows = ad::Tensor::from(mb.frames, {H * B, kFrameDim});
      ad::Tensor teach = ad::Tensor::from(mb.actions, {B, kActionDim});

      EncodeOut enc = nets.encode(windows, B, variant == Variant::kFull, &eta_rng);
      ad::Tensor z_pi = sc.stop_policy_gradient_to_encoder ? enc.z.detach() : enc.z;
      ad::Tensor imit = imitation_loss(nets.act(z_pi), teach);

      ad::Tensor loss = imit;
      double recon_mse_total = 0.0, recon_mse_scan = 0.0, kl = 0.0, beta_logged = 0.0;
      if (variant == Variant::kFull) {
        ad::Tensor targets = ad::Tensor::from(mb.targets, {B, sim::kReconDim});
        ElboParts parts = elbo_loss(nets, enc, targets, beta);
        loss = student_loss(imit, parts.loss, sc.lambda_elbo);
        recon_mse_total = parts.recon_mse_total;
        recon_mse_scan = parts.recon_mse_scan;
        kl = parts.kl;
        beta_logged = beta;
      }

      if (!ad::all_finite(loss)) {
        log_error("student update " + std::to_string(update_count) +
                  " produced a non-finite loss, stopping");
        restore();
        res.aborted = true;
        break;
      }

      nets.params.zero_grad();
      ad::backward(loss);
      ad::clip_grad_norm(params_vec, sc.max_grad_norm);
      opt.step();

      imit_val = imit.data()[0];
      imitation_hist.push_back(imit_val);
      ++update_count;
      csv.write_row({static_cast<double>(update_count), imit_val, recon_mse_total,
                     recon_mse_scan, kl, beta_logged});
    }
    csv.flush();

    if (!res.aborted && sc.checkpoint_every_rounds > 0 &&
        (round + 1) % sc.checkpoint_every_rounds == 0 && round + 1 < sc.rounds) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s_r%03d.ckpt", variant_name(variant), round + 1);
      ad::save_checkpoint(out / "checkpoints" / name, nets.params, checkpoint_kind(variant));
    }
    log_info("round " + std::to_string(round + 1) + "/" + std::to_string(sc.rounds) + ": +" +
             std::to_string(stats.new_steps) + " steps (buffer " +
             std::to_string(buffer.size_steps()) + "), " + std::to_string(n_updates) +
             " updates, imitation " + std::to_string(imit_val));
  }

  ad::save_checkpoint(out / checkpoint_filename(variant), nets.params, checkpoint_kind(variant));

  res.updates = static_cast<int>(update_count);
  const size_t n = imitation_hist.size();
  const size_t head = std::min<size_t>(10, n);
  res.initial_imitation = mean_of(imitation_hist, 0, head);
  res.final_imitation = mean_of(imitation_hist, n - std::min<size_t>(10, n), n);

  // Held-out style probe of the denoiser: fresh buffer draws, deterministic
  // latent, decoder scan block against the clean target, with the corrupted
  // input scan as the do-nothing baseline.
  if (variant == Variant::kFull && buffer.size_steps() > 0) {
    ad::NoGradGuard guard;
    const int B = static_cast<int>(std::min<int64_t>(2048, buffer.size_steps()));
    refs.clear();
    for (int i = 0; i < B; ++i) refs.push_back(buffer.sample(probe_rng));
    mb.gather(buffer, refs, H);
    ad::Tensor windows = ad::Tensor::from(mb.frames, {H * B, kFrameDim});
    EncodeOut enc = nets.encode(windows, B, false, nullptr);
    ad::Tensor dec = nets.decode(enc.z);
    auto d = dec.data();
    const int scan0 = sim::kReconDim - terrain::kScanPoints;
    double dn = 0.0, id = 0.0;
    for (int i = 0; i < B; ++i) {
      const double* tgt = mb.targets.data() + static_cast<size_t>(i) * sim::kReconDim;
      const double* last =
          mb.frames.data() + (static_cast<size_t>(H - 1) * B + i) * kFrameDim + kProprioCols;
      for (int k = 0; k < terrain::kScanPoints; ++k) {
        const double e1 = d[static_cast<size_t>(i) * sim::kReconDim + scan0 + k] - tgt[scan0 + k];
        const double e2 = last[k] - tgt[scan0 + k];
        dn += e1 * e1;
        id += e2 * e2;
      }
    }
    res.denoise_scan_mse = dn / (static_cast<double>(B) * terrain::kScanPoints);
    res.identity_scan_mse = id / (static_cast<double>(B) * terrain::kScanPoints);
  }

  json summary = {{"updates", res.updates},
                  {"steps_collected", res.steps_collected},
                  {"aborted", res.aborted},
                  {"initial_imitation", res.initial_imitation},
                  {"final_imitation", res.final_imitation},
                  {"denoise_scan_mse", res.denoise_scan_mse},
                  {"identity_scan_mse", res.identity_scan_mse}};
  write_text_file(out / "train_summary.json", summary.dump(2) + "\n");
  return res;
}

}  // namespace hpc::student
