#include "hpc/noise/domain_rand.hpp"

namespace hpc::noise {

EpisodeDynamics draw_episode_dynamics(const DomainRandConfig& cfg, Rng& rng) {
  EpisodeDynamics d;
  if (!cfg.enabled) return d;
  d.friction = rng.uniform(cfg.friction_lo, cfg.friction_hi);
  d.payload = rng.uniform(-cfg.payload_range, cfg.payload_range);
  d.gravity_delta = rng.uniform(-cfg.gravity_range, cfg.gravity_range);
  d.kd_scale = rng.uniform(cfg.damping_lo, cfg.damping_hi);
  d.kp_scale = rng.uniform(cfg.stiffness_lo, cfg.stiffness_hi);
  for (int j = 0; j < sim::kNumJoints; ++j)
    d.motor_offset[j] = rng.uniform(-cfg.motor_offset_range, cfg.motor_offset_range);
  return d;
}

void apply_dynamics(const EpisodeDynamics& d, sim::PhysicsParams& params, sim::PdGains& gains) {
  params.friction = d.friction;
  params.payload = d.payload;
  params.gravity += d.gravity_delta;
  gains.kd_scale = d.kd_scale;
  gains.kp_scale = d.kp_scale;
}

void corrupt_proprio(const DomainRandConfig& cfg, const EpisodeDynamics& d, double intensity,
                     Rng& step_rng, std::span<double, sim::kStudentDim> obs) {
  if (!cfg.enabled || intensity == 0.0) return;
  auto scale = [&](int idx, double range) {
    obs[idx] *= 1.0 + step_rng.uniform(-range, range) * intensity;
  };
  scale(sim::sidx::kPitchRate, cfg.ang_vel_range);
  scale(sim::sidx::kGravity, cfg.gravity_obs_range);
  scale(sim::sidx::kGravity + 1, cfg.gravity_obs_range);
  for (int j = 0; j < sim::kNumJoints; ++j) {
    scale(sim::sidx::kJointPos + j, cfg.joint_pos_range);
    obs[sim::sidx::kJointPos + j] += d.motor_offset[j] * intensity;
  }
  for (int j = 0; j < sim::kNumJoints; ++j) scale(sim::sidx::kJointVel + j, cfg.joint_vel_range);
}

}  // namespace hpc::noise
