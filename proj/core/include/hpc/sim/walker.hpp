#pragma once

#include <array>
#include <cstdint>

#include "hpc/terrain/terrain.hpp"

namespace hpc::sim {

inline constexpr int kNumJoints = 4;   // hipL, kneeL, hipR, kneeR
inline constexpr int kNumFeet = 2;

// Planar biped: rigid torso in the x-z plane, two massless 2-link legs with
// point feet. Contact is a penalty spring-damper with a Coulomb friction
// cone; joints integrate against a fixed reflected inertia with the contact
// wrench mapped through the foot Jacobian. Semi-implicit Euler, 4 substeps
// of 5 ms per 50 Hz control step.
struct PhysicsParams {
  double gravity = 9.81;            // magnitude, acts along -z
  double torso_mass = 18.0;         // kg
  double payload = 0.0;             // additive mass on the torso
  double torso_inertia = 1.2;       // pitch axis, kg m^2
  double joint_inertia = 0.4;       // reflected inertia per joint
  double joint_damping = 0.1;       // passive, N m s/rad

  double thigh_len = 0.4, shank_len = 0.4;
  double hip_offset = 0.12;         // hips at +-offset along body x

  double contact_stiffness = 20000.0;  // N/m
  double contact_damping = 200.0;      // N s/m
  double friction = 1.0;               // Coulomb coefficient
  double tangent_gain = 2000.0;        // viscous stick force slope, N s/m

  double control_dt = 0.02;
  int substeps = 4;

  double total_mass() const { return torso_mass + payload; }
};

struct PdGains {
  std::array<double, kNumJoints> kp{60.0, 60.0, 60.0, 60.0};
  std::array<double, kNumJoints> kd{5.0, 5.0, 5.0, 5.0};
  double torque_limit = 80.0;
  // domain randomization hooks (Table-style scaling rows)
  double kp_scale = 1.0;
  double kd_scale = 1.0;
};

inline constexpr std::array<double, kNumJoints> kDefaultPose{0.25, -0.5, 0.25, -0.5};
inline constexpr std::array<double, kNumJoints> kJointLower{-1.0, -2.2, -1.0, -2.2};
inline constexpr std::array<double, kNumJoints> kJointUpper{1.0, -0.05, 1.0, -0.05};
inline constexpr double kActionClip = 0.8;  // rad around the default pose

struct WalkerState {
  double x = 0.0, z = 0.0, pitch = 0.0;       // pitch > 0 tips the nose up
  double vx = 0.0, vz = 0.0, pitch_rate = 0.0;
  std::array<double, kNumJoints> q = kDefaultPose;
  std::array<double, kNumJoints> qd{0, 0, 0, 0};
  std::array<bool, kNumFeet> foot_contact{false, false};
  std::array<double, kNumFeet> foot_normal_force{0.0, 0.0};
  std::array<double, kNumJoints> applied_torque{0, 0, 0, 0};
  double time = 0.0;
  bool fault = false;  // non-finite state encountered; treated as fallen
};

struct Command {
  double target_vx = 0.0;          // m/s along world x
  double target_pitch_rate = 0.0;  // rad/s, held near zero in practice
};

// Body-frame unit gravity direction: upright -> (0,-1), pitch pi/2 -> (-1,0).
std::array<double, 2> projected_gravity(double pitch);

// World foot positions for the current pose.
std::array<std::array<double, 2>, kNumFeet> foot_positions(const WalkerState& s,
                                                           const PhysicsParams& p);

// Default pose resting on the terrain under the spawn point, with the
// static contact penetration already applied so the start is settled.
WalkerState default_state(const PhysicsParams& p, const terrain::HeightField& hf,
                          double spawn_x = 0.0);

// Advances one control step. action = desired joint offsets from the
// default pose (callers clip to +-kActionClip); PD torque
// tau = kp (action + q_default - q) - kd qd, clamped to the torque limit.
WalkerState step(const WalkerState& s, const std::array<double, kNumJoints>& action,
                 const terrain::HeightField& hf, const PhysicsParams& p, const PdGains& g);

enum class Termination { kRunning, kFallen, kTimeout };

inline constexpr double kEpisodeSeconds = 20.0;
inline constexpr double kMinRootHeight = 0.4;   // above local terrain
inline constexpr double kMaxPitch = 1.0;        // rad

// Fall beats timeout when both hold on the same step.
Termination check_termination(const WalkerState& s, const terrain::HeightField& hf,
                              double episode_seconds = kEpisodeSeconds);

}  // namespace hpc::sim
