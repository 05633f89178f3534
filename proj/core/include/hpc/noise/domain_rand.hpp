#pragma once

#include <array>

#include "hpc/common/rng.hpp"
#include "hpc/sim/obs.hpp"

namespace hpc::noise {

// Randomization table. Sensor rows are applied to observations every step
// and scale with the noise-intensity multiplier; dynamics rows are drawn
// once per episode and never scale with intensity.
//
//   row                range        op        applied to
//   angular velocity   +-0.2        scaling   pitch-rate observation
//   projected gravity  +-0.1        scaling   gravity observation
//   joint position     +-0.1        scaling   joint position observation
//   joint velocity     +-1.5        scaling   joint velocity observation
//   motor offset       +-0.1 rad    additive  joint position observation
//   friction           [0.2, 1.5]   absolute  contact friction coefficient
//   payload            +-5 kg       additive  torso mass
//   gravity            +-0.1        additive  gravity magnitude
//   joint damping      [0.8, 1.2]   scaling   PD kd
//   joint stiffness    [0.8, 1.2]   scaling   PD kp
//
// Scaling rows multiply the nominal by (1 + u * intensity), u ~ U(-r, r);
// the damping/stiffness factor rows draw the factor directly.
struct DomainRandConfig {
  bool enabled = true;
  double ang_vel_range = 0.2;
  double gravity_obs_range = 0.1;
  double joint_pos_range = 0.1;
  double joint_vel_range = 1.5;
  double motor_offset_range = 0.1;
  double friction_lo = 0.2, friction_hi = 1.5;
  double payload_range = 5.0;
  double gravity_range = 0.1;
  double damping_lo = 0.8, damping_hi = 1.2;
  double stiffness_lo = 0.8, stiffness_hi = 1.2;
};

struct EpisodeDynamics {
  double friction = 1.0;
  double payload = 0.0;
  double gravity_delta = 0.0;
  double kd_scale = 1.0;
  double kp_scale = 1.0;
  std::array<double, sim::kNumJoints> motor_offset{0, 0, 0, 0};
};

// Draw order: friction, payload, gravity, damping, stiffness, motor offsets.
EpisodeDynamics draw_episode_dynamics(const DomainRandConfig& cfg, Rng& rng);

void apply_dynamics(const EpisodeDynamics& d, sim::PhysicsParams& params, sim::PdGains& gains);

// Per-step sensor corruption of a student observation, in place. Draw
// order: pitch rate, gravity x2, joint positions x4, joint velocities x4.
// Consumes no draws and changes nothing when intensity == 0. Commands,
// previous action and the scan slot are untouched (the scan has its own
// corruption path).
void corrupt_proprio(const DomainRandConfig& cfg, const EpisodeDynamics& d, double intensity,
                     Rng& step_rng, std::span<double, sim::kStudentDim> obs);

}  // namespace hpc::noise
