#include "hpc/student/dagger.hpp"

#include <algorithm>

#include "hpc/ad/checkpoint.hpp"

namespace hpc::student {

using ad::Tensor;

TeacherPolicy TeacherPolicy::load(const std::filesystem::path& ckpt,
                                  const config::RunConfig& cfg, int num_envs) {
  TeacherPolicy t;
  Rng scratch(0);
  t.nets = oracle::OracleNets::create(cfg.oracle.nets, cfg.oracle.ppo, scratch);
  ad::load_checkpoint(ckpt, t.nets.params, oracle::kOracleCheckpointKind);
  t.hidden = cfg.oracle.nets.lstm_hidden;
  t.h.assign(static_cast<size_t>(num_envs) * t.hidden, 0.0);
  t.c.assign(t.h.size(), 0.0);
  return t;
}

void TeacherPolicy::reset_env(int e) {
  std::fill_n(h.begin() + static_cast<long>(e) * hidden, hidden, 0.0);
  std::fill_n(c.begin() + static_cast<long>(e) * hidden, hidden, 0.0);
}

void TeacherPolicy::label(const std::vector<double>& priv, int rows,
                          std::vector<double>& actions_out) {
  ad::NoGradGuard ng;
  Tensor obs = Tensor::from(priv, {rows, sim::kPrivilegedDim});
  ad::LstmState s{Tensor::from(h, {rows, hidden}), Tensor::from(c, {rows, hidden})};
  oracle::Tower::Out o = nets.actor.forward(obs, s);
  auto hv = o.state.h.data();
  auto cv = o.state.c.data();
  std::copy(hv.begin(), hv.end(), h.begin());
  std::copy(cv.begin(), cv.end(), c.begin());
  auto av = o.out.data();
  actions_out.assign(av.begin(), av.end());
  for (auto& a : actions_out) a = std::clamp(a, -sim::kActionClip, sim::kActionClip);
}

void TeacherPolicy::state_row(int e, std::vector<double>& h_out,
                              std::vector<double>& c_out) const {
  h_out.assign(h.begin() + static_cast<long>(e) * hidden,
               h.begin() + static_cast<long>(e + 1) * hidden);
  c_out.assign(c.begin() + static_cast<long>(e) * hidden,
               c.begin() + static_cast<long>(e + 1) * hidden);
}

DaggerCollector::DaggerCollector(const config::RunConfig& cfg, uint64_t seed,
                                 envs::EnvOptions opt, int num_envs, int window)
    : num_envs_(num_envs), window_(window) {
  envs_.reserve(num_envs);
  for (int e = 0; e < num_envs; ++e) envs_.emplace_back(cfg, seed, e, opt);
  windows_.assign(num_envs, std::vector<double>(static_cast<size_t>(window) * kFrameDim, 0.0));
  pending_.assign(num_envs, EpisodeChunk{});
  chunk_started_.assign(num_envs, false);
  for (int e = 0; e < num_envs; ++e) push_frame(e);  // first observation
}

void DaggerCollector::push_frame(int e) {
  auto& w = windows_[e];
  std::copy(w.begin() + kFrameDim, w.end(), w.begin());  // drop the oldest frame
  auto obs = envs_[e].student();
  std::copy(obs.begin(), obs.end(), w.end() - kFrameDim);
}

void DaggerCollector::start_chunk(int e, const TeacherPolicy& teacher) {
  EpisodeChunk& ch = pending_[e];
  ch = EpisodeChunk{};
  const auto& w = windows_[e];
  ch.prefix.assign(w.begin(), w.begin() + static_cast<size_t>(window_ - 1) * kFrameDim);
  teacher.state_row(e, ch.teacher_h0, ch.teacher_c0);
  chunk_started_[e] = true;
}

DaggerRoundStats DaggerCollector::collect(const StudentNets& student, TeacherPolicy& teacher,
                                          DaggerBuffer& buffer, int64_t steps_target,
                                          WorkerPool& pool) {
  DaggerRoundStats stats;
  const int e_n = num_envs_;
  const int h_n = window_;
  std::vector<double> batch(static_cast<size_t>(h_n) * e_n * kFrameDim);
  std::vector<double> priv(static_cast<size_t>(e_n) * sim::kPrivilegedDim);
  std::vector<double> teacher_actions;
  std::vector<envs::Env::StepResult> results(e_n);
  std::vector<std::array<double, sim::kNumJoints>> acts(e_n);
  std::vector<double> returns_sum, dists;

  while (stats.new_steps < steps_target) {
    // time-major window batch: row t*E + e
    for (int e = 0; e < e_n; ++e)
      for (int t = 0; t < h_n; ++t)
        std::copy_n(windows_[e].begin() + static_cast<long>(t) * kFrameDim, kFrameDim,
                    batch.begin() + (static_cast<size_t>(t) * e_n + e) * kFrameDim);

    std::vector<double> student_actions;
    {
      ad::NoGradGuard ng;
      Tensor w = Tensor::from(batch, {h_n * e_n, kFrameDim});
      EncodeOut enc = student.encode(w, e_n, false, nullptr);
      Tensor a = student.act(enc.z);
      auto av = a.data();
      student_actions.assign(av.begin(), av.end());
    }

    for (int e = 0; e < e_n; ++e) {
      auto p = envs_[e].privileged();
      std::copy(p.begin(), p.end(), priv.begin() + static_cast<long>(e) * sim::kPrivilegedDim);
    }
    teacher.label(priv, e_n, teacher_actions);

    for (int e = 0; e < e_n; ++e) {
      if (!chunk_started_[e]) start_chunk(e, teacher);
      EpisodeChunk& ch = pending_[e];
      const auto& env = envs_[e];
      auto obs = env.student();
      auto tgt = env.recon_target();
      ch.obs.insert(ch.obs.end(), obs.begin(), obs.end());
      ch.teacher_actions.insert(ch.teacher_actions.end(), teacher_actions.begin() + e * sim::kNumJoints,
                                teacher_actions.begin() + (e + 1) * sim::kNumJoints);
      ch.targets.insert(ch.targets.end(), tgt.begin(), tgt.end());
      ch.privileged.insert(ch.privileged.end(),
                           priv.begin() + static_cast<long>(e) * sim::kPrivilegedDim,
                           priv.begin() + static_cast<long>(e + 1) * sim::kPrivilegedDim);
      ++ch.steps;
      for (int j = 0; j < sim::kNumJoints; ++j)
        acts[e][j] = student_actions[static_cast<size_t>(e) * sim::kNumJoints + j];
    }

    pool.for_each(e_n, [&](int e) { results[e] = envs_[e].step(acts[e]); });
    stats.new_steps += e_n;

    for (int e = 0; e < e_n; ++e) {
      if (results[e].done) {
        buffer.append(std::move(pending_[e]));
        chunk_started_[e] = false;
        std::fill(windows_[e].begin(), windows_[e].end(), 0.0);
        teacher.reset_env(e);
        const auto& fin = envs_[e].finished_stats();
        returns_sum.push_back(fin.reward_return);
        dists.push_back(fin.walked);
        ++stats.episodes_finished;
      }
      push_frame(e);
    }
  }

  for (int e = 0; e < e_n; ++e) {
    if (chunk_started_[e] && pending_[e].steps > 0) {
      buffer.append(std::move(pending_[e]));
      chunk_started_[e] = false;
    }
  }

  if (!returns_sum.empty()) {
    for (double r : returns_sum) stats.mean_return += r;
    stats.mean_return /= static_cast<double>(returns_sum.size());
    for (double d : dists) stats.mean_dist += d;
    stats.mean_dist /= static_cast<double>(dists.size());
  }
  return stats;
}

void DaggerCollector::set_gp_length_scale(double l) {
  for (auto& e : envs_) e.set_gp_length_scale(l);
}

}  // namespace hpc::student
