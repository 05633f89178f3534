#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpc/eval/eval_config.hpp"
#include "hpc/noise/corrupt.hpp"
#include "hpc/noise/domain_rand.hpp"
#include "hpc/oracle/ppo_config.hpp"
#include "hpc/sim/reward.hpp"
#include "hpc/student/student_config.hpp"

namespace hpc::config {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct TerrainConfig {
  std::vector<std::string> families{"stair_up", "stair_down", "random_rough",
                                    "pyramid_slope", "boxes", "wave"};
  int max_level = 9;
  double promote_distance = 8.0;
  double demote_distance = 2.0;
  double length = 60.0;
  double cell_size = 0.05;
};

struct NoiseConfig {
  noise::ScanCorruptionSpec scan;
  noise::DomainRandConfig domain;
};

struct OracleConfig {
  oracle::PpoConfig ppo;
  oracle::OracleNetsConfig nets;
  oracle::CommandConfig commands;
};

// The full run configuration. Defaults are the reference values; a JSON
// config overrides fields selectively and unknown keys are rejected with
// their full path.
struct RunConfig {
  sim::PhysicsParams physics;
  sim::PdGains gains;
  sim::RewardConfig reward;
  TerrainConfig terrain;
  NoiseConfig noise;
  OracleConfig oracle;
  student::StudentTrainConfig student;
  eval::EvalConfig eval;
  double episode_seconds = 20.0;
};

RunConfig default_config();

// Parses JSON text / file over the defaults. Throws ConfigError with a
// dotted path ("noise.scan.alpha_lo") for unknown keys or bad types.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

std::string to_json(const RunConfig& cfg);  // full resolved dump

// Writes <out>/config.json (resolved config) and <out>/manifest.json
// (seed, subcommand, version). Creates the directory if needed.
void write_run_artifacts(const std::filesystem::path& out_dir, const RunConfig& cfg,
                         const std::string& subcommand, uint64_t seed);

}  // namespace hpc::config
