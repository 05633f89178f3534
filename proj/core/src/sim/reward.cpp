#include "hpc/sim/reward.hpp"

#include <cmath>

namespace hpc::sim {

RewardTerms compute_reward(const RewardConfig& cfg, const WalkerState& s, const Command& cmd,
                           const std::array<double, kNumJoints>& action,
                           const std::array<double, kNumJoints>& last_action, bool fallen) {
  RewardTerms r;
  const double ev = s.vx - cmd.target_vx;
  r.lin_track = cfg.w_lin_track * std::exp(-cfg.lin_sharpness * ev * ev);
  const double ew = s.pitch_rate - cmd.target_pitch_rate;
  r.ang_track = cfg.w_ang_track * std::exp(-cfg.ang_sharpness * ew * ew);
  r.alive = cfg.w_alive;

  double tau_sq = 0.0, rate_sq = 0.0, limit_over = 0.0;
  for (int j = 0; j < kNumJoints; ++j) {
    tau_sq += s.applied_torque[j] * s.applied_torque[j];
    const double da = action[j] - last_action[j];
    rate_sq += da * da;
    const double lo = kJointLower[j] + cfg.joint_limit_margin;
    const double hi = kJointUpper[j] - cfg.joint_limit_margin;
    if (s.q[j] < lo) limit_over += lo - s.q[j];
    else if (s.q[j] > hi) limit_over += s.q[j] - hi;
  }
  r.torque = cfg.w_torque * tau_sq;
  r.action_rate = cfg.w_action_rate * rate_sq;
  r.joint_limit = cfg.w_joint_limit * limit_over;
  r.vertical_vel = cfg.w_vertical_vel * s.vz * s.vz;
  r.orientation = cfg.w_orientation * s.pitch * s.pitch;
  r.fall = fallen ? cfg.w_fall : 0.0;

  r.total = r.lin_track + r.ang_track + r.alive + r.torque + r.action_rate + r.joint_limit +
            r.vertical_vel + r.orientation + r.fall;
  return r;
}

}  // namespace hpc::sim
