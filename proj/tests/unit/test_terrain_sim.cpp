#include <cmath>
#include <filesystem>

#include "doctest.h"

#include "hpc/sim/obs.hpp"
#include "hpc/sim/reward.hpp"
#include "hpc/sim/walker.hpp"
#include "hpc/terrain/terrain.hpp"

using namespace hpc;

namespace {

terrain::HeightField flat_field(double h = 0.0) {
  terrain::HeightField hf;
  hf.cell_size = 0.05;
  hf.origin = -5.0;
  hf.heights.assign(1201, h);
  return hf;
}

}  // namespace

TEST_SUITE_BEGIN("terrain_sim");

TEST_CASE("family names roundtrip and unknown names throw") {
  using terrain::Family;
  for (auto f : {Family::kFlat, Family::kStairUp, Family::kStairDown, Family::kRandomRough,
                 Family::kPyramidSlope, Family::kBoxes, Family::kWave}) {
    CHECK(terrain::family_from_name(terrain::family_name(f)) == f);
  }
  CHECK_THROWS(terrain::family_from_name("lava"));
}

TEST_CASE("height field interpolates linearly and clamps outside the grid") {
  terrain::HeightField hf;
  hf.cell_size = 1.0;
  hf.origin = 0.0;
  hf.heights = {0.0, 1.0, 3.0};
  CHECK(hf.length() == 2.0);
  CHECK(hf.height_at(0.0) == 0.0);
  CHECK(hf.height_at(0.5) == doctest::Approx(0.5));
  CHECK(hf.height_at(1.5) == doctest::Approx(2.0));
  CHECK(hf.height_at(2.0) == 3.0);
  CHECK(hf.height_at(-4.0) == 0.0);
  CHECK(hf.height_at(11.0) == 3.0);
}

TEST_CASE("every family keeps a flat spawn strip and respects its amplitude") {
  using terrain::Family;
  for (auto f : {Family::kStairUp, Family::kStairDown, Family::kRandomRough,
                 Family::kPyramidSlope, Family::kBoxes, Family::kWave}) {
    CAPTURE(terrain::family_name(f));
    auto hf = terrain::generate(f, 1.0, 77);
    for (double x = -1.5; x <= 1.5; x += 0.05) CHECK(hf.height_at(x) == 0.0);
    for (double h : hf.heights) CHECK(std::isfinite(h));
  }

  auto rough = terrain::generate(Family::kRandomRough, 1.0, 3);
  for (double h : rough.heights) CHECK(std::abs(h) <= 0.1 + 1e-12);
  auto rough_easy = terrain::generate(Family::kRandomRough, 0.0, 3);
  for (double h : rough_easy.heights) CHECK(std::abs(h) <= 0.025 + 1e-12);

  auto wave = terrain::generate(Family::kWave, 0.0, 3);
  double peak = 0;
  for (double h : wave.heights) peak = std::max(peak, std::abs(h));
  CHECK(peak <= 0.05 + 1e-12);
  CHECK(peak > 0.049);  // the sine actually reaches its amplitude

  auto boxes = terrain::generate(Family::kBoxes, 1.0, 3);
  for (double h : boxes.heights) {
    CHECK(h >= 0.0);
    CHECK(h <= 0.25 + 1e-12);
  }
}

TEST_CASE("stair profiles step by the difficulty-scaled rise") {
  auto up = terrain::generate(terrain::Family::kStairUp, 1.0, 9);
  // run 0.30 m, rise 0.05 + 0.15 d = 0.20 at d=1; steps count from x = 2
  CHECK(up.height_at(2.05) == doctest::Approx(0.0));
  CHECK(up.height_at(2.45) == doctest::Approx(0.2));
  CHECK(up.height_at(2.75) == doctest::Approx(0.4));
  auto down = terrain::generate(terrain::Family::kStairDown, 0.0, 9);
  CHECK(down.height_at(2.45) == doctest::Approx(-0.05));
}

TEST_CASE("terrain generation is deterministic in the seed") {
  auto a = terrain::generate(terrain::Family::kRandomRough, 0.6, 42);
  auto b = terrain::generate(terrain::Family::kRandomRough, 0.6, 42);
  CHECK(a.heights == b.heights);
  auto c = terrain::generate(terrain::Family::kRandomRough, 0.6, 43);
  CHECK(a.heights != c.heights);
}

TEST_CASE("scan samples 21 points from -0.5 to +1.5 m relative to the root") {
  CHECK(terrain::kScanPoints == 21);
  // linear ramp: height_at(x) = 0.1 x, exact under linear interpolation
  terrain::HeightField ramp;
  ramp.cell_size = 0.05;
  ramp.origin = -5.0;
  ramp.heights.resize(1201);
  for (size_t i = 0; i < ramp.heights.size(); ++i)
    ramp.heights[i] = 0.1 * (ramp.origin + 0.05 * static_cast<double>(i));
  auto scan = terrain::sample_scan(ramp, 1.0, 0.9);
  for (int i = 0; i < terrain::kScanPoints; ++i) {
    const double off = terrain::kScanStart + terrain::kScanStep * i;
    CHECK(scan[i] == doctest::Approx(0.1 * (1.0 + off) - 0.9).epsilon(1e-12));
  }
}

TEST_CASE("curriculum promotes on distance and demotes on early failure") {
  terrain::Curriculum c;
  c.max_level = 3;
  CHECK(c.difficulty() == 0.0);
  c.update(8.0, false);
  CHECK(c.level == 1);
  c.update(12.0, true);  // distance wins even with early termination
  CHECK(c.level == 2);
  c.update(5.0, true);   // walked >= demote threshold: hold
  CHECK(c.level == 2);
  c.update(1.9, true);
  CHECK(c.level == 1);
  c.update(1.0, false);  // timeout without distance: hold, not demote
  CHECK(c.level == 1);
  c.update(8.0, false);
  c.update(8.0, false);
  c.update(8.0, false);  // capped at max
  CHECK(c.level == 3);
  CHECK(c.difficulty() == 1.0);
  c.level = 0;
  c.update(0.0, true);   // floor at zero
  CHECK(c.level == 0);
}

TEST_CASE("terrain binary roundtrip preserves every field") {
  auto hf = terrain::generate(terrain::Family::kBoxes, 0.35, 123, 20.0, 0.1);
  auto path = std::filesystem::temp_directory_path() / "terrain_rt.bin";
  terrain::write_binary(path, hf);
  auto back = terrain::read_binary(path);
  CHECK(back.family == hf.family);
  CHECK(back.difficulty == hf.difficulty);
  CHECK(back.cell_size == hf.cell_size);
  CHECK(back.origin == hf.origin);
  CHECK(back.heights == hf.heights);
  std::filesystem::remove(path);
}

TEST_CASE("projected gravity rotates with pitch and stays unit length") {
  auto g0 = sim::projected_gravity(0.0);
  CHECK(g0[0] == doctest::Approx(0.0));
  CHECK(g0[1] == doctest::Approx(-1.0));
  auto g90 = sim::projected_gravity(1.5707963267948966);
  CHECK(g90[0] == doctest::Approx(-1.0));
  CHECK(std::abs(g90[1]) < 1e-12);
  for (double p : {-1.2, -0.3, 0.7, 2.5}) {
    auto g = sim::projected_gravity(p);
    CHECK(g[0] * g[0] + g[1] * g[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("default state rests settled on the terrain") {
  sim::PhysicsParams p;
  auto hf = flat_field(0.25);
  auto s = sim::default_state(p, hf);
  CHECK(s.q == sim::kDefaultPose);
  CHECK(s.time == 0.0);
  CHECK_FALSE(s.fault);
  const double settle = p.total_mass() * p.gravity / (sim::kNumFeet * p.contact_stiffness);
  auto feet = sim::foot_positions(s, p);
  for (auto& f : feet) CHECK(f[1] == doctest::Approx(0.25 - settle).epsilon(1e-12));
}

TEST_CASE("airborne torso follows exact ballistic motion") {
  sim::PhysicsParams p;
  auto hf = flat_field(0.0);
  auto s = sim::default_state(p, hf);
  s.z += 5.0;  // well clear of the ground
  s.vx = 0.7;
  s.pitch_rate = 0.3;
  const double x0 = s.x, z0 = s.z, pitch0 = s.pitch;

  auto s1 = sim::step(s, {0, 0, 0, 0}, hf, p, sim::PdGains{});
  CHECK(s1.vz == doctest::Approx(-p.gravity * p.control_dt).epsilon(1e-12));
  // semi-implicit Euler: z drop = -g h^2 (1+2+3+4) over four substeps
  const double h = p.control_dt / p.substeps;
  CHECK(s1.z - z0 == doctest::Approx(-p.gravity * h * h * 10.0).epsilon(1e-9));
  CHECK(s1.x - x0 == doctest::Approx(0.7 * p.control_dt).epsilon(1e-12));
  CHECK(s1.vx == doctest::Approx(0.7));
  CHECK(s1.pitch - pitch0 == doctest::Approx(0.3 * p.control_dt).epsilon(1e-12));
  CHECK(s1.foot_contact[0] == false);
  CHECK(s1.foot_normal_force[0] == 0.0);
  CHECK(s1.time == doctest::Approx(p.control_dt));
}

TEST_CASE("standing with zero action stays put and supports the weight") {
  sim::PhysicsParams p;
  auto hf = flat_field(0.0);
  auto s = sim::default_state(p, hf);
  const double z0 = s.z;
  for (int i = 0; i < 200; ++i) s = sim::step(s, {0, 0, 0, 0}, hf, p, sim::PdGains{});
  CHECK_FALSE(s.fault);
  CHECK(std::abs(s.z - z0) < 0.02);
  CHECK(std::abs(s.pitch) < 0.1);
  CHECK(std::abs(s.vx) < 0.1);
  CHECK(s.foot_contact[0]);
  CHECK(s.foot_contact[1]);
  const double weight = p.total_mass() * p.gravity;
  const double support = s.foot_normal_force[0] + s.foot_normal_force[1];
  CHECK(support == doctest::Approx(weight).epsilon(0.05));
}

TEST_CASE("pd torque saturates at the limit") {
  sim::PhysicsParams p;
  p.substeps = 1;
  p.control_dt = 0.005;
  auto hf = flat_field(0.0);
  auto s = sim::default_state(p, hf);
  s.q[0] = -1.0;  // 1.25 rad from default
  s.qd[0] = -10.0;
  sim::PdGains g;
  auto s1 = sim::step(s, {0, 0, 0, 0}, hf, p, g);
  CHECK(s1.applied_torque[0] == g.torque_limit);
  for (int j = 0; j < sim::kNumJoints; ++j)
    CHECK(std::abs(s1.applied_torque[j]) <= g.torque_limit);
}

TEST_CASE("joint clamps respect the limit boxes") {
  sim::PhysicsParams p;
  auto hf = flat_field(0.0);
  auto s = sim::default_state(p, hf);
  // drive hip towards its upper limit hard
  for (int i = 0; i < 100; ++i) s = sim::step(s, {5.0, 0, 0, 0}, hf, p, sim::PdGains{});
  for (int j = 0; j < sim::kNumJoints; ++j) {
    CHECK(s.q[j] >= sim::kJointLower[j]);
    CHECK(s.q[j] <= sim::kJointUpper[j]);
  }
}

TEST_CASE("termination distinguishes falls, timeouts and faults") {
  sim::PhysicsParams p;
  auto hf = flat_field(0.0);
  auto s = sim::default_state(p, hf);
  CHECK(sim::check_termination(s, hf) == sim::Termination::kRunning);

  auto low = s;
  low.z = hf.height_at(low.x) + 0.3;  // below the 0.4 clearance floor
  CHECK(sim::check_termination(low, hf) == sim::Termination::kFallen);

  auto tipped = s;
  tipped.pitch = 1.2;
  CHECK(sim::check_termination(tipped, hf) == sim::Termination::kFallen);

  auto old_state = s;
  old_state.time = 20.0;
  CHECK(sim::check_termination(old_state, hf) == sim::Termination::kTimeout);

  auto both = tipped;
  both.time = 25.0;  // fall beats timeout
  CHECK(sim::check_termination(both, hf) == sim::Termination::kFallen);

  auto faulted = s;
  faulted.fault = true;
  CHECK(sim::check_termination(faulted, hf) == sim::Termination::kFallen);
}

TEST_CASE("non-finite dynamics set the fault flag instead of propagating") {
  sim::PhysicsParams p;
  auto hf = flat_field(0.0);
  auto s = sim::default_state(p, hf);
  s.vx = std::nan("");
  auto s1 = sim::step(s, {0, 0, 0, 0}, hf, p, sim::PdGains{});
  CHECK(s1.fault);
  CHECK(sim::check_termination(s1, hf) == sim::Termination::kFallen);
}

TEST_CASE("reward matches the closed-form terms") {
  sim::RewardConfig cfg;
  sim::Command cmd{0.6, 0.0};

  sim::WalkerState s;  // default pose, zero rates
  s.vx = 0.6;
  s.z = 1.0;
  auto r = sim::compute_reward(cfg, s, cmd, {0, 0, 0, 0}, {0, 0, 0, 0}, false);
  CHECK(r.lin_track == doctest::Approx(2.0));
  CHECK(r.ang_track == doctest::Approx(1.0));
  CHECK(r.alive == 0.5);
  CHECK(r.total == doctest::Approx(3.5));

  s.vx = 0.1;  // velocity error 0.5
  r = sim::compute_reward(cfg, s, cmd, {0, 0, 0, 0}, {0, 0, 0, 0}, false);
  CHECK(r.lin_track == doctest::Approx(2.0 * std::exp(-4.0 * 0.25)).epsilon(1e-12));

  s.vx = 0.6;
  s.vz = 0.4;
  s.pitch = 0.3;
  s.applied_torque = {10, -20, 5, 0};
  r = sim::compute_reward(cfg, s, cmd, {0.1, 0, 0, 0}, {-0.1, 0, 0, 0}, false);
  CHECK(r.torque == doctest::Approx(-1e-4 * (100 + 400 + 25)).epsilon(1e-12));
  CHECK(r.action_rate == doctest::Approx(-0.01 * 0.04).epsilon(1e-12));
  CHECK(r.vertical_vel == doctest::Approx(-0.5 * 0.16).epsilon(1e-12));
  CHECK(r.orientation == doctest::Approx(-1.0 * 0.09).epsilon(1e-12));

  // 0.1 rad past the soft margin at the hip upper limit (1.0 - 0.05)
  auto sq = s;
  sq.q[0] = 1.0;
  r = sim::compute_reward(cfg, sq, cmd, {0, 0, 0, 0}, {0, 0, 0, 0}, false);
  CHECK(r.joint_limit == doctest::Approx(-1.0 * 0.05).epsilon(1e-10));

  r = sim::compute_reward(cfg, s, cmd, {0, 0, 0, 0}, {0, 0, 0, 0}, true);
  CHECK(r.fall == -100.0);
}

TEST_CASE("privileged observation lays fields out as documented") {
  sim::PhysicsParams p;
  auto hf = flat_field(0.1);
  sim::WalkerState s;
  s.x = 0.4;
  s.z = 1.1;
  s.pitch = 0.2;
  s.vx = 0.5;
  s.vz = -0.1;
  s.pitch_rate = 0.8;
  s.q = {0.3, -0.6, 0.2, -0.4};
  s.qd = {1.0, -2.0, 3.0, -4.0};
  s.foot_contact = {true, false};
  s.foot_normal_force = {100.0, 0.0};
  sim::Command cmd{0.7, 0.1};
  std::array<double, sim::kNumJoints> last{0.05, -0.05, 0.1, -0.1};

  auto obs = sim::privileged_obs(s, cmd, hf, p, last);
  CHECK(obs[sim::pidx::kClearance] == doctest::Approx(1.0));  // 1.1 - 0.1
  auto g = sim::projected_gravity(0.2);
  CHECK(obs[sim::pidx::kGravity] == g[0]);
  CHECK(obs[sim::pidx::kGravity + 1] == g[1]);
  CHECK(obs[sim::pidx::kLinVel] == 0.5);
  CHECK(obs[sim::pidx::kLinVel + 1] == -0.1);
  CHECK(obs[sim::pidx::kPitchRate] == doctest::Approx(0.8 * sim::kPitchRateScale));
  CHECK(obs[sim::pidx::kCommand] == 0.7);
  CHECK(obs[sim::pidx::kCommand + 1] == 0.1);
  CHECK(obs[sim::pidx::kContactFlags] == 1.0);
  CHECK(obs[sim::pidx::kContactFlags + 1] == 0.0);
  CHECK(obs[sim::pidx::kContactForces] ==
        doctest::Approx(100.0 / (p.total_mass() * p.gravity)));
  CHECK(obs[sim::pidx::kJointPos] == doctest::Approx(0.3 - sim::kDefaultPose[0]));
  CHECK(obs[sim::pidx::kJointVel] == doctest::Approx(1.0 * sim::kJointVelScale));
  CHECK(obs[sim::pidx::kLastAction] == 0.05);
  CHECK(obs[sim::pidx::kLastAction + 3] == -0.1);
  for (int i = 0; i < terrain::kScanPoints; ++i)
    CHECK(obs[sim::pidx::kScan + i] == doctest::Approx(0.1 - 1.1));
}

TEST_CASE("student observation is the privileged one minus hidden fields") {
  sim::PhysicsParams p;
  auto hf = flat_field(0.0);
  sim::WalkerState s;
  s.z = 0.9;
  s.vx = 0.4;
  s.pitch = -0.1;
  s.pitch_rate = 0.5;
  s.qd = {0.5, 0.5, 0.5, 0.5};
  s.foot_contact = {true, true};
  s.foot_normal_force = {80.0, 90.0};
  sim::Command cmd{0.6, 0.0};
  std::array<double, sim::kNumJoints> last{0, 0, 0, 0};

  auto priv = sim::privileged_obs(s, cmd, hf, p, last);
  auto stu = sim::student_obs_from_privileged(priv);
  auto direct = sim::extract_student_obs(s, cmd, hf, p, last);
  CHECK(stu == direct);

  // order-preserving projection: student index -> privileged index
  const int map_checks[][2] = {{sim::sidx::kGravity, sim::pidx::kGravity},
                               {sim::sidx::kLinVel, sim::pidx::kLinVel},
                               {sim::sidx::kPitchRate, sim::pidx::kPitchRate},
                               {sim::sidx::kCommand, sim::pidx::kCommand},
                               {sim::sidx::kJointPos, sim::pidx::kJointPos},
                               {sim::sidx::kJointVel, sim::pidx::kJointVel},
                               {sim::sidx::kLastAction, sim::pidx::kLastAction},
                               {sim::sidx::kScan, sim::pidx::kScan}};
  for (auto [si, pi] : map_checks) CHECK(stu[si] == priv[pi]);

  // nothing privileged leaks: clearance and contact data absent
  auto recon = sim::recon_target_from_privileged(priv);
  REQUIRE(recon.size() == sim::kReconDim);
  CHECK(recon[0] == priv[sim::pidx::kClearance]);
  CHECK(recon[1] == priv[sim::pidx::kLinVel]);
  CHECK(recon[2] == priv[sim::pidx::kLinVel + 1]);
  CHECK(recon[3] == priv[sim::pidx::kContactFlags]);
  CHECK(recon[4] == priv[sim::pidx::kContactFlags + 1]);
  for (int i = 0; i < terrain::kScanPoints; ++i)
    CHECK(recon[5 + i] == priv[sim::pidx::kScan + i]);
}

TEST_SUITE_END();
