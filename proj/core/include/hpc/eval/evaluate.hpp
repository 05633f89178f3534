#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hpc/eval/policy.hpp"

namespace hpc::eval {

struct EpisodeResult {
  int stream = 0;
  int episode = 0;    // index within the stream
  double vel_err = 0.0;   // mean |v - v*| over the episode
  double ang_err = 0.0;   // mean |w - w*|
  double reward_return = 0.0;
  double walked = 0.0;
  int steps = 0;
  int level_after = 0;  // curriculum level after the promote/demote update
};

struct MetricsRow {
  std::string variant;
  double intensity = 0.0;
  double e_vel = 0.0, e_vel_std = 0.0;
  double e_ang = 0.0, e_ang_std = 0.0;
  double m_terrain = 0.0, m_terrain_std = 0.0;
  double m_reward = 0.0, m_reward_std = 0.0;
  int episodes = 0;
};

// One evaluated condition: every episode of (variant, intensity, seed),
// streams concatenated in stream order.
struct EvalCell {
  std::string variant;
  double intensity = 0.0;
  uint64_t seed = 0;
  std::vector<EpisodeResult> episodes;

  double mean_terrain() const;
};

struct EvalRunResult {
  std::vector<MetricsRow> rows;   // per (variant, intensity), seeds pooled
  std::vector<EvalCell> cells;    // per (variant, intensity, seed)
};

// Environment seed for an evaluation stream; a dedicated branch of the
// seed's stream tree, disjoint from anything the trainers draw.
uint64_t stream_env_seed(uint64_t base_seed, int stream);

// Runs every (variant, intensity, seed, stream) condition and aggregates.
// episodes_per_condition is split across cfg.eval.streams independent
// curriculum streams. Deterministic for fixed inputs regardless of workers;
// verifies that no parameter changed.
EvalRunResult evaluate(const config::RunConfig& cfg, const std::vector<VariantSpec>& variants,
                       const std::vector<double>& intensities,
                       const std::vector<uint64_t>& seeds, int workers);

MetricsRow aggregate_row(const std::string& variant, double intensity,
                         const std::vector<const EvalCell*>& cells);

}  // namespace hpc::eval
