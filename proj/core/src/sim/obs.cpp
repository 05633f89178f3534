#include "hpc/sim/obs.hpp"

namespace hpc::sim {

std::array<double, kPrivilegedDim> privileged_obs(const WalkerState& s, const Command& cmd,
                                                  const terrain::HeightField& hf,
                                                  const PhysicsParams& p,
                                                  const std::array<double, kNumJoints>& last_action) {
  std::array<double, kPrivilegedDim> o{};
  o[pidx::kClearance] = s.z - hf.height_at(s.x);
  const auto grav = projected_gravity(s.pitch);
  o[pidx::kGravity] = grav[0];
  o[pidx::kGravity + 1] = grav[1];
  o[pidx::kLinVel] = s.vx;
  o[pidx::kLinVel + 1] = s.vz;
  o[pidx::kPitchRate] = s.pitch_rate * kPitchRateScale;
  o[pidx::kCommand] = cmd.target_vx;
  o[pidx::kCommand + 1] = cmd.target_pitch_rate;
  const double weight = p.total_mass() * p.gravity;
  for (int f = 0; f < kNumFeet; ++f) {
    o[pidx::kContactFlags + f] = s.foot_contact[f] ? 1.0 : 0.0;
    o[pidx::kContactForces + f] = s.foot_normal_force[f] / weight;
  }
  for (int j = 0; j < kNumJoints; ++j) {
    o[pidx::kJointPos + j] = s.q[j] - kDefaultPose[j];
    o[pidx::kJointVel + j] = s.qd[j] * kJointVelScale;
    o[pidx::kLastAction + j] = last_action[j];
  }
  const auto scan = terrain::sample_scan(hf, s.x, s.z);
  for (int i = 0; i < terrain::kScanPoints; ++i) o[pidx::kScan + i] = scan[i];
  return o;
}

std::array<double, kStudentDim> student_obs_from_privileged(
    std::span<const double, kPrivilegedDim> priv) {
  std::array<double, kStudentDim> o{};
  int k = 0;
  for (int i = 0; i < kPrivilegedDim; ++i) {
    if (i == pidx::kClearance) continue;
    if (i >= pidx::kContactFlags && i < pidx::kContactForces + kNumFeet) continue;
    o[k++] = priv[i];
  }
  return o;
}

std::array<double, kStudentDim> extract_student_obs(const WalkerState& s, const Command& cmd,
                                                    const terrain::HeightField& hf,
                                                    const PhysicsParams& p,
                                                    const std::array<double, kNumJoints>& last_action) {
  const auto priv = privileged_obs(s, cmd, hf, p, last_action);
  return student_obs_from_privileged(std::span<const double, kPrivilegedDim>(priv));
}

std::array<double, kReconDim> recon_target_from_privileged(
    std::span<const double, kPrivilegedDim> priv) {
  std::array<double, kReconDim> t{};
  t[0] = priv[pidx::kClearance];
  t[1] = priv[pidx::kLinVel];
  t[2] = priv[pidx::kLinVel + 1];
  t[3] = priv[pidx::kContactFlags];
  t[4] = priv[pidx::kContactFlags + 1];
  for (int i = 0; i < terrain::kScanPoints; ++i) t[5 + i] = priv[pidx::kScan + i];
  return t;
}

}  // namespace hpc::sim
