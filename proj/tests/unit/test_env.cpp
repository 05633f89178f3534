#include <array>
#include <cmath>
#include <set>

#include "doctest.h"

#include "hpc/config/config.hpp"
#include "hpc/envs/env.hpp"

using namespace hpc;

namespace {

config::RunConfig quick_cfg() {
  auto cfg = config::default_config();
  cfg.episode_seconds = 0.4;  // 20-step episodes keep these tests fast
  return cfg;
}

template <typename Span>
std::vector<double> to_vec(Span s) {
  return std::vector<double>(s.begin(), s.end());
}

}  // namespace

TEST_SUITE_BEGIN("env");

TEST_CASE("scan offsets span -0.5 to 1.5 in tenth steps") {
  auto off = envs::scan_offsets();
  REQUIRE(off.size() == static_cast<size_t>(terrain::kScanPoints));
  CHECK(off[0] == -0.5);
  CHECK(off[20] == doctest::Approx(1.5));
  for (int i = 1; i < terrain::kScanPoints; ++i)
    CHECK(off[i] - off[i - 1] == doctest::Approx(0.1));
}

TEST_CASE("same seed and index replay bit-exactly, different ones diverge") {
  auto cfg = quick_cfg();
  envs::EnvOptions opt;
  opt.noise_intensity = 1.0;
  opt.dynamics_randomization = true;

  envs::Env a(cfg, 42, 3, opt);
  envs::Env b(cfg, 42, 3, opt);
  envs::Env c(cfg, 43, 3, opt);
  envs::Env d(cfg, 42, 4, opt);

  bool c_diverged = to_vec(a.student()) != to_vec(c.student());
  bool d_diverged = to_vec(a.student()) != to_vec(d.student());
  for (int t = 0; t < 60; ++t) {
    std::array<double, sim::kNumJoints> act{0.1 * std::sin(0.3 * t), -0.05, 0.1, 0.0};
    auto ra = a.step(act);
    auto rb = b.step(act);
    auto rc = c.step(act);
    auto rd = d.step(act);
    CHECK(ra.reward == rb.reward);
    CHECK(ra.done == rb.done);
    CHECK(to_vec(a.student()) == to_vec(b.student()));
    CHECK(to_vec(a.privileged()) == to_vec(b.privileged()));
    CHECK(to_vec(a.recon_target()) == to_vec(b.recon_target()));
    c_diverged = c_diverged || ra.reward != rc.reward;
    d_diverged = d_diverged || ra.reward != rd.reward;
  }
  CHECK(a.state().x == b.state().x);
  CHECK(c_diverged);
  CHECK(d_diverged);
}

TEST_CASE("episode draws depend on the episode index, not on how it was played") {
  auto cfg = quick_cfg();
  envs::EnvOptions opt;
  opt.noise_intensity = 1.0;
  opt.dynamics_randomization = true;

  envs::Env a(cfg, 7, 0, opt);
  envs::Env b(cfg, 7, 0, opt);
  // play episode 0 differently in the two instances
  while (a.episode_index() == 0) a.step({0, 0, 0, 0});
  while (b.episode_index() == 0) b.step({0.3, -0.2, 0.25, -0.15});

  REQUIRE(a.episode_index() == 1);
  REQUIRE(b.episode_index() == 1);
  // both walked ~0 m, so the curriculum state matches; episode 1 must too
  CHECK(a.level() == b.level());
  CHECK(a.command().target_vx == b.command().target_vx);
  CHECK(a.family() == b.family());
  CHECK(a.heightfield().heights == b.heightfield().heights);
  CHECK(a.effective_physics().friction == b.effective_physics().friction);
  CHECK(to_vec(a.privileged()) == to_vec(b.privileged()));
}

TEST_CASE("auto-reset hands out final observations and finished stats") {
  auto cfg = quick_cfg();
  envs::Env env(cfg, 11, 0, envs::EnvOptions{});
  int steps = 0;
  envs::Env::StepResult res;
  while (true) {
    res = env.step({0, 0, 0, 0});
    ++steps;
    if (res.done) break;
    REQUIRE(steps < 10000);
  }
  CHECK(res.termination == sim::Termination::kTimeout);  // standing still times out
  CHECK(steps == 20);  // 0.4 s / 0.02 s

  const auto& st = env.finished_stats();
  CHECK(st.steps == steps);
  CHECK(st.termination == sim::Termination::kTimeout);
  CHECK(std::abs(st.walked) < 0.5);
  CHECK(st.mean_vel_err() == doctest::Approx(st.vel_err_sum / steps));

  // the env rolled into episode 1 already
  CHECK(env.episode_index() == 1);
  CHECK(env.state().time == 0.0);

  // final student obs is the clean projection of the final privileged obs
  auto fp = env.final_privileged();
  auto fs = env.final_student();
  auto proj = sim::student_obs_from_privileged(fp);
  CHECK(to_vec(fs) == to_vec(std::span<const double, sim::kStudentDim>(proj)));
  // and it belongs to the finished episode, not the fresh one
  CHECK(to_vec(fs) != to_vec(env.student()));
}

TEST_CASE("commands are drawn per episode inside the configured band") {
  auto cfg = quick_cfg();
  envs::EnvOptions opt;
  opt.vx_lo = 0.45;
  opt.vx_hi = 0.55;
  opt.pitch_rate_cmd = 0.125;
  envs::Env env(cfg, 3, 0, opt);
  std::set<double> seen;
  for (int ep = 0; ep < 30; ++ep) {
    CHECK(env.command().target_vx >= 0.45);
    CHECK(env.command().target_vx <= 0.55);
    CHECK(env.command().target_pitch_rate == 0.125);
    seen.insert(env.command().target_vx);
    while (env.episode_index() == static_cast<uint64_t>(ep)) env.step({0, 0, 0, 0});
  }
  CHECK(seen.size() > 25);  // fresh draw basically every episode
}

TEST_CASE("dynamics randomization toggles per-episode physics perturbation") {
  auto cfg = quick_cfg();

  envs::EnvOptions off;
  envs::Env clean(cfg, 5, 0, off);
  for (int ep = 0; ep < 5; ++ep) {
    CHECK(clean.effective_physics().friction == cfg.physics.friction);
    CHECK(clean.effective_physics().payload == 0.0);
    CHECK(clean.effective_gains().kp_scale == 1.0);
    while (clean.episode_index() == static_cast<uint64_t>(ep)) clean.step({0, 0, 0, 0});
  }

  envs::EnvOptions on;
  on.dynamics_randomization = true;
  envs::Env rnd(cfg, 5, 0, on);
  std::set<double> frictions;
  for (int ep = 0; ep < 8; ++ep) {
    const auto& p = rnd.effective_physics();
    CHECK(p.friction >= cfg.noise.domain.friction_lo);
    CHECK(p.friction <= cfg.noise.domain.friction_hi);
    CHECK(std::abs(p.payload) <= cfg.noise.domain.payload_range);
    frictions.insert(p.friction);
    while (rnd.episode_index() == static_cast<uint64_t>(ep)) rnd.step({0, 0, 0, 0});
  }
  CHECK(frictions.size() > 5);
}

TEST_CASE("zero intensity never touches the step stream") {
  auto cfg = quick_cfg();
  envs::Env env(cfg, 21, 0, envs::EnvOptions{});
  for (int t = 0; t < 30; ++t) {
    CHECK(to_vec(env.student()) == to_vec(env.student_clean()));
    CHECK(to_vec(env.privileged()) == to_vec(env.privileged_noisy()));
    env.step({0.05, 0, -0.05, 0});
  }
}

TEST_CASE("sensor noise corrupts student and shared privileged channels only") {
  auto cfg = quick_cfg();
  envs::EnvOptions opt;
  opt.noise_intensity = 1.5;
  envs::Env env(cfg, 23, 0, opt);
  env.step({0, 0, 0, 0});

  auto priv = env.privileged();
  auto noisy = env.privileged_noisy();
  auto stud = env.student();
  auto clean = env.student_clean();

  // privileged-only channels are never corrupted
  CHECK(noisy[sim::pidx::kClearance] == priv[sim::pidx::kClearance]);
  for (int f = 0; f < sim::kNumFeet; ++f) {
    CHECK(noisy[sim::pidx::kContactFlags + f] == priv[sim::pidx::kContactFlags + f]);
    CHECK(noisy[sim::pidx::kContactForces + f] == priv[sim::pidx::kContactForces + f]);
  }

  // the shared channels carry exactly the student's corruption
  CHECK(noisy[sim::pidx::kGravity] == stud[sim::sidx::kGravity]);
  CHECK(noisy[sim::pidx::kPitchRate] == stud[sim::sidx::kPitchRate]);
  for (int i = 0; i < terrain::kScanPoints; ++i)
    CHECK(noisy[sim::pidx::kScan + i] == stud[sim::sidx::kScan + i]);

  // clean student view matches the uncorrupted privileged projection
  auto proj = sim::student_obs_from_privileged(priv);
  CHECK(to_vec(clean) == to_vec(std::span<const double, sim::kStudentDim>(proj)));

  // corruption actually moved the sensor channels but spared the command
  bool scan_changed = false;
  for (int i = 0; i < terrain::kScanPoints; ++i)
    scan_changed = scan_changed || stud[sim::sidx::kScan + i] != clean[sim::sidx::kScan + i];
  CHECK(scan_changed);
  CHECK(stud[sim::sidx::kCommand] == clean[sim::sidx::kCommand]);
  CHECK(stud[sim::sidx::kCommand + 1] == clean[sim::sidx::kCommand + 1]);

  // recon target is built from the clean privileged view
  auto recon = env.recon_target();
  CHECK(recon[0] == priv[sim::pidx::kClearance]);
  for (int i = 0; i < terrain::kScanPoints; ++i)
    CHECK(recon[5 + i] == priv[sim::pidx::kScan + i]);
}

TEST_CASE("intensity changes apply without re-seeding the episode") {
  auto cfg = quick_cfg();
  envs::EnvOptions opt;
  opt.noise_intensity = 0.0;
  envs::Env env(cfg, 29, 0, opt);
  env.step({0, 0, 0, 0});
  CHECK(to_vec(env.student()) == to_vec(env.student_clean()));
  env.set_noise_intensity(2.0);
  env.step({0, 0, 0, 0});
  CHECK(to_vec(env.student()) != to_vec(env.student_clean()));
}

TEST_CASE("start level clamps into the curriculum range and times out holding") {
  auto cfg = quick_cfg();
  envs::EnvOptions opt;
  opt.start_level = 99;
  envs::Env env(cfg, 31, 0, opt);
  CHECK(env.level() == cfg.terrain.max_level);

  opt.start_level = 3;
  envs::Env held(cfg, 31, 0, opt);
  CHECK(held.level() == 3);
  CHECK(held.finished_stats().steps == 0);
  while (held.episode_index() == 0) held.step({0, 0, 0, 0});
  // timed out standing on the spawn strip: no promotion, no demotion
  CHECK(held.finished_stats().level_at_start == 3);
  CHECK(held.level() == 3);
}

TEST_SUITE_END();
