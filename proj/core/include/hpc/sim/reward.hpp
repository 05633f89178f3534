#pragma once

#include "hpc/sim/walker.hpp"

namespace hpc::sim {

// Per-step reward. Tracking terms are exponential kernels exp(-k err^2);
// regularizers are negative-weighted penalties; the fall penalty applies
// once on the terminal step. Weights are per control step (no dt scaling).
struct RewardConfig {
  double w_lin_track = 2.0;
  double lin_sharpness = 4.0;
  double w_ang_track = 1.0;
  double ang_sharpness = 4.0;
  double w_alive = 0.5;
  double w_torque = -1e-4;       // * sum tau^2
  double w_action_rate = -0.01;  // * sum (a - a_prev)^2
  double w_joint_limit = -1.0;   // * sum overshoot past the soft margin
  double w_vertical_vel = -0.5;  // * vz^2
  double w_orientation = -1.0;   // * pitch^2
  double w_fall = -100.0;        // terminal
  double joint_limit_margin = 0.05;  // rad inside the hard limits
};

struct RewardTerms {
  double lin_track = 0, ang_track = 0, alive = 0, torque = 0, action_rate = 0;
  double joint_limit = 0, vertical_vel = 0, orientation = 0, fall = 0;
  double total = 0;
};

RewardTerms compute_reward(const RewardConfig& cfg, const WalkerState& s, const Command& cmd,
                           const std::array<double, kNumJoints>& action,
                           const std::array<double, kNumJoints>& last_action, bool fallen);

}  // namespace hpc::sim
