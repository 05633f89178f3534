#include <array>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hpc/common/io.hpp"
#include "hpc/common/log.hpp"
#include "hpc/common/version.hpp"
#include "hpc/config/config.hpp"
#include "hpc/envs/env.hpp"
#include "hpc/eval/evaluate.hpp"
#include "hpc/eval/report.hpp"
#include "hpc/oracle/train.hpp"
#include "hpc/student/export.hpp"
#include "hpc/student/no_distill.hpp"
#include "hpc/student/train.hpp"

namespace fs = std::filesystem;
using namespace hpc;

namespace {

config::RunConfig load_cfg(const std::string& path) {
  if (path.empty()) return config::default_config();
  return config::load_config(path);
}

int run_train_oracle(const std::string& config_path, uint64_t seed, const std::string& out,
                     int workers) {
  config::RunConfig cfg = load_cfg(config_path);
  config::write_run_artifacts(out, cfg, "train-oracle", seed);
  oracle::TrainResult r = oracle::train_oracle(cfg, seed, out, workers);
  if (r.aborted) {
    std::cerr << "training aborted on a non-finite update; last good parameters saved\n";
    return 1;
  }
  log_info("oracle done: reward " + std::to_string(r.last_reward_mean) + ", distance " +
           std::to_string(r.last_dist_mean));
  return 0;
}

int run_distill(const std::string& config_path, uint64_t seed, const std::string& out,
                int workers, const std::string& variant_name, const std::string& teacher) {
  config::RunConfig cfg = load_cfg(config_path);
  const student::Variant variant = student::variant_from_name(variant_name);
  config::write_run_artifacts(out, cfg, "distill", seed);
  if (variant == student::Variant::kNoDistill) {
    student::NoDistillTrainResult r = student::train_no_distill(cfg, seed, out, workers);
    if (r.aborted) {
      std::cerr << "training aborted on a non-finite update; last good parameters saved\n";
      return 1;
    }
    log_info("no_distill done: reward " + std::to_string(r.last_reward_mean));
    return 0;
  }
  if (teacher.empty()) {
    std::cerr << "distill: --teacher is required for variant '" << variant_name << "'\n";
    return 2;
  }
  student::StudentTrainResult r = student::train_student(cfg, variant, teacher, seed, out,
                                                         workers);
  if (r.aborted) {
    std::cerr << "training aborted on a non-finite update; last good parameters saved\n";
    return 1;
  }
  log_info("distill done: imitation " + std::to_string(r.final_imitation));
  return 0;
}

int run_export(const std::string& student_path, const std::string& out_path) {
  const int64_t kept = student::export_inference(student_path, out_path);
  log_info("wrote inference bundle " + out_path + " (" + std::to_string(kept) + " scalars)");
  return 0;
}

int run_eval(const std::string& config_path, const std::string& ckpt_dir,
             const std::string& out, const std::vector<std::string>& variants,
             const std::vector<double>& noise, int seed_count, uint64_t seed_base,
             int episodes, int workers) {
  config::RunConfig cfg = load_cfg(config_path);
  if (episodes > 0) cfg.eval.episodes_per_condition = episodes;
  const std::vector<double> intensities = noise.empty() ? cfg.eval.intensities : noise;
  std::vector<uint64_t> seeds;
  for (int i = 0; i < seed_count; ++i) seeds.push_back(seed_base + static_cast<uint64_t>(i));

  std::vector<eval::VariantSpec> specs;
  for (const auto& name : variants) specs.push_back(eval::load_variant(name, ckpt_dir, cfg));

  config::write_run_artifacts(out, cfg, "eval", seed_base);
  eval::EvalRunResult res = eval::evaluate(cfg, specs, intensities, seeds, workers);
  eval::write_report(out, cfg, res, seeds);
  log_info("eval done: " + std::to_string(res.rows.size()) + " table rows, " +
           std::to_string(res.cells.size()) + " cells -> " + out);
  return 0;
}

int run_noise_probe(const std::string& config_path, int n, const std::string& out,
                    uint64_t seed, double intensity) {
  config::RunConfig cfg = load_cfg(config_path);
  config::write_run_artifacts(out, cfg, "noise-probe", seed);

  envs::EnvOptions opt;
  opt.noise_intensity = intensity;
  opt.gp_length_scale = cfg.noise.scan.gp.length_scale_end;
  envs::Env env(cfg, seed, 0, opt);

  std::vector<std::string> columns{"sample"};
  for (int i = 0; i < terrain::kScanPoints; ++i) columns.push_back("corrupted_" + std::to_string(i));
  for (int i = 0; i < terrain::kScanPoints; ++i) columns.push_back("clean_" + std::to_string(i));
  CsvWriter csv(fs::path(out) / "probe.csv", columns);

  std::array<double, sim::kNumJoints> zero{};
  std::vector<double> row(columns.size());
  for (int i = 0; i < n; ++i) {
    row[0] = i;
    auto noisy = env.student();
    auto clean = env.student_clean();
    for (int k = 0; k < terrain::kScanPoints; ++k) {
      row[1 + k] = noisy[student::kProprioCols + k];
      row[1 + terrain::kScanPoints + k] = clean[student::kProprioCols + k];
    }
    csv.write_row(row);
    env.step(zero);
  }
  log_info("noise probe: " + std::to_string(n) + " scans -> " + out);
  return 0;
}

int run_sim_trace(const std::string& config_path, int steps, const std::string& out,
                  uint64_t seed, double intensity) {
  config::RunConfig cfg = load_cfg(config_path);
  config::write_run_artifacts(out, cfg, "sim-trace", seed);

  envs::EnvOptions opt;
  opt.noise_intensity = intensity;
  envs::Env env(cfg, seed, 0, opt);

  // row t holds the state the controller saw before step t, plus the
  // reward and termination flag that step t produced
  CsvWriter csv(fs::path(out) / "trace.csv",
                {"step", "episode", "x", "z", "pitch", "vx", "vz", "pitch_rate", "q0", "q1",
                 "q2", "q3", "qd0", "qd1", "qd2", "qd3", "contact_left", "contact_right",
                 "force_left", "force_right", "target_vx", "reward", "done"});

  std::array<double, sim::kNumJoints> zero{};
  for (int t = 0; t < steps; ++t) {
    const sim::WalkerState& s = env.state();
    const uint64_t episode = env.episode_index();
    const double target_vx = env.command().target_vx;
    envs::Env::StepResult r = env.step(zero);
    csv.write_row({static_cast<double>(t), static_cast<double>(episode), s.x, s.z, s.pitch,
                   s.vx, s.vz, s.pitch_rate, s.q[0], s.q[1], s.q[2], s.q[3], s.qd[0], s.qd[1],
                   s.qd[2], s.qd[3], s.foot_contact[0] ? 1.0 : 0.0,
                   s.foot_contact[1] ? 1.0 : 0.0, s.foot_normal_force[0],
                   s.foot_normal_force[1], target_vx, r.reward, r.done ? 1.0 : 0.0});
  }
  log_info("trace: " + std::to_string(steps) + " steps -> " + out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-stage perceptive locomotion pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_path, out, teacher, student_ckpt, ckpt_dir, variant = "full";
  std::vector<std::string> variants{"oracle", "student", "student_no_wm", "student_no_distill"};
  std::vector<double> noise_list;
  double noise_intensity = 1.0;
  uint64_t seed = 1;
  int workers = 1, probe_n = 5, trace_steps = 500, seed_count = 5, episodes = 0;

  CLI::App* train = app.add_subcommand("train-oracle", "stage 1: privileged PPO training");
  train->add_option("--config", config_path, "JSON config overriding the defaults");
  train->add_option("--seed", seed, "run seed")->required();
  train->add_option("--out", out, "output directory")->required();
  train->add_option("--workers", workers, "parallel environment threads");

  CLI::App* distill = app.add_subcommand("distill", "stage 2: train a student variant");
  distill->add_option("--config", config_path, "JSON config overriding the defaults");
  distill->add_option("--seed", seed, "run seed")->required();
  distill->add_option("--out", out, "output directory")->required();
  distill->add_option("--workers", workers, "parallel environment threads");
  distill->add_option("--variant", variant, "full | no_wm | no_distill");
  distill->add_option("--teacher", teacher, "oracle checkpoint (labeling source)");

  CLI::App* exp = app.add_subcommand("export", "strip a student checkpoint for inference");
  exp->add_option("--student", student_ckpt, "student checkpoint")->required();
  exp->add_option("--out", out, "bundle file path")->required();

  CLI::App* ev = app.add_subcommand("eval", "metrics over variants x noise levels");
  ev->add_option("--config", config_path, "JSON config overriding the defaults");
  ev->add_option("--ckpt-dir", ckpt_dir, "directory holding the variant checkpoints")
      ->required();
  ev->add_option("--out", out, "report directory")->required();
  ev->add_option("--variants", variants, "subset of oracle,student,student_no_wm,student_no_distill")
      ->delimiter(',');
  ev->add_option("--noise", noise_list, "noise intensities")->delimiter(',');
  ev->add_option("--seeds", seed_count, "number of evaluation seeds");
  ev->add_option("--seed", seed, "first evaluation seed");
  ev->add_option("--episodes", episodes, "episodes per condition (config override)");
  ev->add_option("--workers", workers, "parallel evaluation threads");

  CLI::App* probe = app.add_subcommand("noise-probe", "dump corrupted elevation scans");
  probe->add_option("--config", config_path, "JSON config overriding the defaults");
  probe->add_option("--n", probe_n, "number of scans");
  probe->add_option("--out", out, "output directory")->required();
  probe->add_option("--seed", seed, "probe seed");
  probe->add_option("--noise", noise_intensity, "corruption intensity");

  CLI::App* trace = app.add_subcommand("sim-trace", "dump a zero-action state trace");
  trace->add_option("--config", config_path, "JSON config overriding the defaults");
  trace->add_option("--steps", trace_steps, "control steps to record");
  trace->add_option("--out", out, "output directory")->required();
  trace->add_option("--seed", seed, "trace seed");
  trace->add_option("--noise", noise_intensity, "corruption intensity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (train->parsed()) return run_train_oracle(config_path, seed, out, workers);
    if (distill->parsed()) return run_distill(config_path, seed, out, workers, variant, teacher);
    if (exp->parsed()) return run_export(student_ckpt, out);
    if (ev->parsed())
      return run_eval(config_path, ckpt_dir, out, variants, noise_list, seed_count, seed,
                      episodes, workers);
    if (probe->parsed()) return run_noise_probe(config_path, probe_n, out, seed, noise_intensity);
    if (trace->parsed()) return run_sim_trace(config_path, trace_steps, out, seed, noise_intensity);
  } catch (const config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
