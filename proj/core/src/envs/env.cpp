#include "hpc/envs/env.hpp"

#include <algorithm>
#include <cmath>

namespace hpc::envs {

namespace {
// substream tags under the env root
constexpr uint64_t kEpisodeStream = 1;
constexpr uint64_t kStepStream = 2;
}  // namespace

std::span<const double> scan_offsets() {
  static const auto offsets = [] {
    std::array<double, terrain::kScanPoints> o{};
    for (int i = 0; i < terrain::kScanPoints; ++i)
      o[i] = terrain::kScanStart + terrain::kScanStep * i;
    return o;
  }();
  return offsets;
}

Env::Env(const config::RunConfig& cfg, uint64_t seed, int index, EnvOptions opt)
    : cfg_(cfg), opt_(opt), root_(Rng(seed).derive(10, static_cast<uint64_t>(index))),
      step_rng_(0) {
  curriculum_.max_level = cfg_.terrain.max_level;
  curriculum_.promote_distance = cfg_.terrain.promote_distance;
  curriculum_.demote_distance = cfg_.terrain.demote_distance;
  curriculum_.level = std::clamp(opt_.start_level, 0, curriculum_.max_level);
  begin_episode();
}

void Env::begin_episode() {
  Rng ep = root_.derive(kEpisodeStream, episode_);
  const auto& families = cfg_.terrain.families;
  const auto fam = terrain::family_from_name(
      families[static_cast<size_t>(ep.uniform_int(0, static_cast<int>(families.size()) - 1))]);
  const uint64_t terrain_seed = ep.next_u64();
  cmd_.target_vx = ep.uniform(opt_.vx_lo, opt_.vx_hi);
  cmd_.target_pitch_rate = opt_.pitch_rate_cmd;

  physics_ = cfg_.physics;
  gains_ = cfg_.gains;
  dynamics_ = noise::EpisodeDynamics{};
  if (opt_.dynamics_randomization) {
    dynamics_ = noise::draw_episode_dynamics(cfg_.noise.domain, ep);
    noise::apply_dynamics(dynamics_, physics_, gains_);
  }
  scan_noise_ = noise::draw_episode_scan_noise(cfg_.noise.scan, opt_.gp_length_scale,
                                               scan_offsets(), ep);

  hf_ = terrain::generate(fam, curriculum_.difficulty(), terrain_seed, cfg_.terrain.length,
                          cfg_.terrain.cell_size);
  state_ = sim::default_state(physics_, hf_, 0.0);
  start_x_ = state_.x;
  last_action_ = {0, 0, 0, 0};
  step_rng_ = root_.derive(kStepStream, episode_);
  current_ = EpisodeStats{};
  current_.level_at_start = curriculum_.level;
  compute_obs();
}

void Env::compute_obs() {
  priv_ = sim::privileged_obs(state_, cmd_, hf_, physics_, last_action_);
  stud_clean_ = sim::student_obs_from_privileged(std::span<const double, sim::kPrivilegedDim>(priv_));
  stud_ = stud_clean_;
  if (opt_.noise_intensity != 0.0) {
    noise::corrupt_proprio(cfg_.noise.domain, dynamics_, opt_.noise_intensity, step_rng_,
                           std::span<double, sim::kStudentDim>(stud_));
    noise::corrupt_scan(
        std::span<const double>(stud_clean_.data() + sim::sidx::kScan, terrain::kScanPoints),
        scan_noise_, opt_.noise_intensity, step_rng_,
        std::span<double>(stud_.data() + sim::sidx::kScan, terrain::kScanPoints));
  }
  recon_ = sim::recon_target_from_privileged(std::span<const double, sim::kPrivilegedDim>(priv_));
  priv_noisy_ = priv_;
  int k = 0;
  for (int i = 0; i < sim::kPrivilegedDim; ++i) {
    if (i == sim::pidx::kClearance) continue;
    if (i >= sim::pidx::kContactFlags && i < sim::pidx::kContactForces + sim::kNumFeet) continue;
    priv_noisy_[i] = stud_[k++];
  }
}

Env::StepResult Env::step(const std::array<double, sim::kNumJoints>& action) {
  std::array<double, sim::kNumJoints> a = action;
  for (auto& v : a) v = std::clamp(v, -sim::kActionClip, sim::kActionClip);

  state_ = sim::step(state_, a, hf_, physics_, gains_);
  const auto term = sim::check_termination(state_, hf_, cfg_.episode_seconds);
  const bool fallen = term == sim::Termination::kFallen;
  const auto terms = sim::compute_reward(cfg_.reward, state_, cmd_, a, last_action_, fallen);
  last_action_ = a;

  current_.steps += 1;
  current_.reward_return += terms.total;
  current_.vel_err_sum += std::abs(state_.vx - cmd_.target_vx);
  current_.ang_err_sum += std::abs(state_.pitch_rate - cmd_.target_pitch_rate);
  current_.walked = state_.x - start_x_;

  StepResult res;
  res.reward = terms.total;
  res.terms = terms;
  res.termination = term;
  res.done = term != sim::Termination::kRunning;

  if (res.done) {
    compute_obs();  // final observation of the finished episode
    final_priv_ = priv_;
    final_stud_ = stud_;
    current_.termination = term;
    finished_ = current_;
    curriculum_.update(current_.walked, fallen);
    ++episode_;
    begin_episode();
  } else {
    compute_obs();
  }
  return res;
}

}  // namespace hpc::envs
