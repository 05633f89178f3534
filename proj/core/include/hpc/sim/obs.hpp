#pragma once

#include <span>

#include "hpc/sim/walker.hpp"

namespace hpc::sim {

// Observation layouts. The student vector is the privileged vector minus
// the privileged-only fields (clearance, contact flags and forces), in the
// same order; obs_layout tests audit that relation.
//
// privileged [45]:
//   0       root clearance above terrain
//   1..2    projected gravity (body frame)
//   3..4    root linear velocity (world vx, vz)
//   5       pitch rate * kPitchRateScale
//   6..7    command (target vx, target pitch rate)
//   8..9    foot contact flags
//   10..11  foot normal forces / (total mass * g)
//   12..15  joint positions - default pose
//   16..19  joint velocities * kJointVelScale
//   20..23  previous action
//   24..44  elevation scan (terrain - root z), 21 points
//
// student [40]: same minus indices {0, 8, 9, 10, 11}; the scan slot carries
// the corrupted scan once sensor noise is applied.
inline constexpr int kPrivilegedDim = 24 + terrain::kScanPoints;  // 45
inline constexpr int kStudentDim = 19 + terrain::kScanPoints;     // 40
inline constexpr int kReconDim = 5 + terrain::kScanPoints;        // 26

inline constexpr double kPitchRateScale = 0.25;
inline constexpr double kJointVelScale = 0.1;

// privileged field offsets
namespace pidx {
inline constexpr int kClearance = 0;
inline constexpr int kGravity = 1;
inline constexpr int kLinVel = 3;
inline constexpr int kPitchRate = 5;
inline constexpr int kCommand = 6;
inline constexpr int kContactFlags = 8;
inline constexpr int kContactForces = 10;
inline constexpr int kJointPos = 12;
inline constexpr int kJointVel = 16;
inline constexpr int kLastAction = 20;
inline constexpr int kScan = 24;
}  // namespace pidx

// student field offsets
namespace sidx {
inline constexpr int kGravity = 0;
inline constexpr int kLinVel = 2;
inline constexpr int kPitchRate = 4;
inline constexpr int kCommand = 5;
inline constexpr int kJointPos = 7;
inline constexpr int kJointVel = 11;
inline constexpr int kLastAction = 15;
inline constexpr int kScan = 19;
}  // namespace sidx

std::array<double, kPrivilegedDim> privileged_obs(const WalkerState& s, const Command& cmd,
                                                  const terrain::HeightField& hf,
                                                  const PhysicsParams& p,
                                                  const std::array<double, kNumJoints>& last_action);

std::array<double, kStudentDim> student_obs_from_privileged(
    std::span<const double, kPrivilegedDim> priv);

std::array<double, kStudentDim> extract_student_obs(const WalkerState& s, const Command& cmd,
                                                    const terrain::HeightField& hf,
                                                    const PhysicsParams& p,
                                                    const std::array<double, kNumJoints>& last_action);

// Reconstruction target for the world model decoder: clearance, root
// velocity, contact flags, clean scan.
std::array<double, kReconDim> recon_target_from_privileged(
    std::span<const double, kPrivilegedDim> priv);

}  // namespace hpc::sim
