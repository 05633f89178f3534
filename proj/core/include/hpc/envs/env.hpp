#pragma once

#include "hpc/config/config.hpp"
#include "hpc/sim/obs.hpp"

namespace hpc::envs {

struct EnvOptions {
  bool dynamics_randomization = false;
  double noise_intensity = 0.0;   // scales sensor corruption; 0 = clean
  double gp_length_scale = 0.2;   // takes effect at the next episode start
  int start_level = 0;
  double vx_lo = 0.3, vx_hi = 0.9;
  double pitch_rate_cmd = 0.0;
};

struct EpisodeStats {
  double walked = 0.0;
  double reward_return = 0.0;
  int steps = 0;
  double vel_err_sum = 0.0;
  double ang_err_sum = 0.0;
  int level_at_start = 0;
  sim::Termination termination = sim::Termination::kRunning;

  double mean_vel_err() const { return steps ? vel_err_sum / steps : 0.0; }
  double mean_ang_err() const { return steps ? ang_err_sum / steps : 0.0; }
};

// One walker instance with episode lifecycle: terrain from the curriculum,
// per-episode dynamics and scan-noise draws, per-step sensor corruption,
// reward, termination and auto-reset.
//
// Randomness is organised in substreams of the env's root stream so any
// (seed, episode, step) triple replays identically: the episode stream
// draws, in order, terrain family, terrain seed, command, dynamics,
// scan alpha/beta; the step stream is consumed per step by corrupt_proprio
// then corrupt_scan. At intensity 0 the step stream is never touched.
class Env {
 public:
  Env(const config::RunConfig& cfg, uint64_t seed, int index, EnvOptions opt);

  struct StepResult {
    double reward = 0.0;
    sim::RewardTerms terms;
    bool done = false;
    sim::Termination termination = sim::Termination::kRunning;
  };
  // action = desired joint offsets; clipped to +-kActionClip here.
  StepResult step(const std::array<double, sim::kNumJoints>& action);

  std::span<const double, sim::kPrivilegedDim> privileged() const { return priv_; }
  // privileged with the student-shared sensor channels corrupted
  std::span<const double, sim::kPrivilegedDim> privileged_noisy() const { return priv_noisy_; }
  std::span<const double, sim::kStudentDim> student() const { return stud_; }
  std::span<const double, sim::kStudentDim> student_clean() const { return stud_clean_; }
  std::span<const double, sim::kReconDim> recon_target() const { return recon_; }

  // pre-reset observations of the episode that just finished (valid after a
  // step() that returned done; used for timeout bootstrapping)
  std::span<const double, sim::kPrivilegedDim> final_privileged() const { return final_priv_; }
  std::span<const double, sim::kStudentDim> final_student() const { return final_stud_; }
  const EpisodeStats& finished_stats() const { return finished_; }

  const sim::WalkerState& state() const { return state_; }
  const terrain::HeightField& heightfield() const { return hf_; }
  const sim::PhysicsParams& effective_physics() const { return physics_; }
  const sim::PdGains& effective_gains() const { return gains_; }
  const std::array<double, sim::kNumJoints>& last_action() const { return last_action_; }
  const sim::Command& command() const { return cmd_; }
  terrain::Family family() const { return hf_.family; }
  int level() const { return curriculum_.level; }
  uint64_t episode_index() const { return episode_; }

  void set_noise_intensity(double v) { opt_.noise_intensity = v; }
  void set_gp_length_scale(double v) { opt_.gp_length_scale = v; }

 private:
  void begin_episode();
  void compute_obs();

  config::RunConfig cfg_;
  EnvOptions opt_;
  Rng root_;
  Rng step_rng_;
  uint64_t episode_ = 0;
  terrain::Curriculum curriculum_;
  terrain::HeightField hf_;
  sim::PhysicsParams physics_;
  sim::PdGains gains_;
  noise::EpisodeDynamics dynamics_;
  noise::EpisodeScanNoise scan_noise_;
  sim::Command cmd_;
  sim::WalkerState state_;
  std::array<double, sim::kNumJoints> last_action_{0, 0, 0, 0};
  double start_x_ = 0.0;

  std::array<double, sim::kPrivilegedDim> priv_{}, priv_noisy_{}, final_priv_{};
  std::array<double, sim::kStudentDim> stud_{}, stud_clean_{}, final_stud_{};
  std::array<double, sim::kReconDim> recon_{};
  EpisodeStats current_, finished_;
};

// Scan offsets as a reusable array (matches terrain::sample_scan).
std::span<const double> scan_offsets();

}  // namespace hpc::envs
