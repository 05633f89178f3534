#include "hpc/sim/walker.hpp"

#include <algorithm>
#include <cmath>

namespace hpc::sim {

namespace {

struct FootKin {
  std::array<double, 2> pos;      // world
  std::array<double, 2> vel;      // world
  std::array<double, 2> rel;      // pos - root
  // world-frame Jacobian columns d(pos)/d(q_hip), d(pos)/d(q_knee)
  std::array<double, 2> j_hip;
  std::array<double, 2> j_knee;
};

FootKin foot_kinematics(const WalkerState& s, const PhysicsParams& p, int foot) {
  const double side = foot == 0 ? -1.0 : 1.0;
  const double qh = s.q[foot * 2], qk = s.q[foot * 2 + 1];
  const double qdh = s.qd[foot * 2], qdk = s.qd[foot * 2 + 1];
  const double c = std::cos(s.pitch), sn = std::sin(s.pitch);

  // body frame: hip anchor, thigh down at qh, shank at qh+qk
  const double hx = side * p.hip_offset;
  const double a1 = qh, a2 = qh + qk;
  const double bx = hx + p.thigh_len * std::sin(a1) + p.shank_len * std::sin(a2);
  const double bz = -p.thigh_len * std::cos(a1) - p.shank_len * std::cos(a2);
  // body-frame jacobian
  const double jh_x = p.thigh_len * std::cos(a1) + p.shank_len * std::cos(a2);
  const double jh_z = p.thigh_len * std::sin(a1) + p.shank_len * std::sin(a2);
  const double jk_x = p.shank_len * std::cos(a2);
  const double jk_z = p.shank_len * std::sin(a2);

  FootKin k;
  // world = root + R(pitch) * body, R is CCW in the x-z plane
  k.rel = {c * bx - sn * bz, sn * bx + c * bz};
  k.pos = {s.x + k.rel[0], s.z + k.rel[1]};
  k.j_hip = {c * jh_x - sn * jh_z, sn * jh_x + c * jh_z};
  k.j_knee = {c * jk_x - sn * jk_z, sn * jk_x + c * jk_z};
  // d/dt of R*body: pitch_rate * perp(rel) + R * (J q̇)
  const double bvx = jh_x * qdh + jk_x * qdk;
  const double bvz = jh_z * qdh + jk_z * qdk;
  k.vel = {s.vx - s.pitch_rate * k.rel[1] + c * bvx - sn * bvz,
           s.vz + s.pitch_rate * k.rel[0] + sn * bvx + c * bvz};
  return k;
}

bool finite(const WalkerState& s) {
  if (!std::isfinite(s.x) || !std::isfinite(s.z) || !std::isfinite(s.pitch) ||
      !std::isfinite(s.vx) || !std::isfinite(s.vz) || !std::isfinite(s.pitch_rate))
    return false;
  for (int j = 0; j < kNumJoints; ++j)
    if (!std::isfinite(s.q[j]) || !std::isfinite(s.qd[j])) return false;
  return true;
}

}  // namespace

std::array<double, 2> projected_gravity(double pitch) {
  return {-std::sin(pitch), -std::cos(pitch)};
}

std::array<std::array<double, 2>, kNumFeet> foot_positions(const WalkerState& s,
                                                           const PhysicsParams& p) {
  return {foot_kinematics(s, p, 0).pos, foot_kinematics(s, p, 1).pos};
}

WalkerState default_state(const PhysicsParams& p, const terrain::HeightField& hf,
                          double spawn_x) {
  WalkerState s;
  s.x = spawn_x;
  s.q = kDefaultPose;
  const double a1 = kDefaultPose[0], a2 = kDefaultPose[0] + kDefaultPose[1];
  const double foot_drop = p.thigh_len * std::cos(a1) + p.shank_len * std::cos(a2);
  // preload the contact springs with the static share of the weight
  const double settle = p.total_mass() * p.gravity / (kNumFeet * p.contact_stiffness);
  s.z = hf.height_at(spawn_x) + foot_drop - settle;
  return s;
}

WalkerState step(const WalkerState& s0, const std::array<double, kNumJoints>& action,
                 const terrain::HeightField& hf, const PhysicsParams& p, const PdGains& g) {
  WalkerState s = s0;
  if (s.fault) return s;
  const double dt = p.control_dt / p.substeps;
  const double mass = p.total_mass();

  for (int sub = 0; sub < p.substeps; ++sub) {
    // PD torques against the held action target
    std::array<double, kNumJoints> tau;
    for (int j = 0; j < kNumJoints; ++j) {
      const double target = action[j] + kDefaultPose[j];
      double t = g.kp[j] * g.kp_scale * (target - s.q[j]) - g.kd[j] * g.kd_scale * s.qd[j];
      tau[j] = std::clamp(t, -g.torque_limit, g.torque_limit);
    }

    double fx = 0.0, fz = 0.0, torque = 0.0;
    std::array<double, kNumJoints> joint_ext{0, 0, 0, 0};
    for (int foot = 0; foot < kNumFeet; ++foot) {
      const FootKin k = foot_kinematics(s, p, foot);
      const double ground = hf.height_at(k.pos[0]);
      const double pen = ground - k.pos[1];
      if (pen <= 0.0) {
        s.foot_contact[foot] = false;
        s.foot_normal_force[foot] = 0.0;
        continue;
      }
      double fn = p.contact_stiffness * pen - p.contact_damping * k.vel[1];
      fn = std::max(fn, 0.0);
      double ft = -p.tangent_gain * k.vel[0];
      const double cone = p.friction * fn;
      ft = std::clamp(ft, -cone, cone);

      fx += ft;
      fz += fn;
      torque += k.rel[0] * fn - k.rel[1] * ft;
      joint_ext[foot * 2] += k.j_hip[0] * ft + k.j_hip[1] * fn;
      joint_ext[foot * 2 + 1] += k.j_knee[0] * ft + k.j_knee[1] * fn;
      s.foot_contact[foot] = true;
      s.foot_normal_force[foot] = fn;
    }

    // hip reactions act back on the torso
    torque -= tau[0] + tau[2];

    const double ax = fx / mass;
    const double az = fz / mass - p.gravity;
    const double apitch = torque / p.torso_inertia;

    s.vx += ax * dt;
    s.vz += az * dt;
    s.pitch_rate += apitch * dt;
    s.x += s.vx * dt;
    s.z += s.vz * dt;
    s.pitch += s.pitch_rate * dt;

    for (int j = 0; j < kNumJoints; ++j) {
      const double qdd = (tau[j] + joint_ext[j] - p.joint_damping * s.qd[j]) / p.joint_inertia;
      s.qd[j] += qdd * dt;
      s.q[j] += s.qd[j] * dt;
      if (s.q[j] < kJointLower[j]) {
        s.q[j] = kJointLower[j];
        if (s.qd[j] < 0.0) s.qd[j] = 0.0;
      } else if (s.q[j] > kJointUpper[j]) {
        s.q[j] = kJointUpper[j];
        if (s.qd[j] > 0.0) s.qd[j] = 0.0;
      }
    }
    s.applied_torque = tau;
  }

  s.time = s0.time + p.control_dt;
  if (!finite(s)) {
    s = s0;
    s.fault = true;
    s.time = s0.time + p.control_dt;
  }
  return s;
}

Termination check_termination(const WalkerState& s, const terrain::HeightField& hf,
                              double episode_seconds) {
  if (s.fault) return Termination::kFallen;
  const double clearance = s.z - hf.height_at(s.x);
  if (clearance < kMinRootHeight || std::abs(s.pitch) > kMaxPitch) return Termination::kFallen;
  if (s.time >= episode_seconds - 0.5 * 1e-9) return Termination::kTimeout;
  return Termination::kRunning;
}

}  // namespace hpc::sim
