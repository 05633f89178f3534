#pragma once

#include <filesystem>

#include "hpc/common/parallel.hpp"
#include "hpc/envs/env.hpp"
#include "hpc/oracle/nets.hpp"
#include "hpc/student/buffer.hpp"
#include "hpc/student/nets.hpp"

namespace hpc::student {

// Frozen stage-1 policy used as the labeling source. Keeps its own
// recurrent stream per environment, fed only clean privileged obs, reset
// at episode starts. Labels are the clipped deterministic action means.
struct TeacherPolicy {
  oracle::OracleNets nets;
  int hidden = 0;
  std::vector<double> h, c;  // [E * hidden]

  static TeacherPolicy load(const std::filesystem::path& ckpt, const config::RunConfig& cfg,
                            int num_envs);
  void reset_env(int e);
  // priv rows [rows * kPrivilegedDim] in env order; advances the stream
  void label(const std::vector<double>& priv, int rows, std::vector<double>& actions_out);
  void state_row(int e, std::vector<double>& h_out, std::vector<double>& c_out) const;
};

struct DaggerRoundStats {
  int64_t new_steps = 0;
  int episodes_finished = 0;
  double mean_return = 0.0;
  double mean_dist = 0.0;
};

// Rollout state persisted across collection rounds: environments, rolling
// observation windows, per-env pending chunks and the teacher stream.
class DaggerCollector {
 public:
  DaggerCollector(const config::RunConfig& cfg, uint64_t seed, envs::EnvOptions opt,
                  int num_envs, int window);

  // Student drives under corruption; teacher labels the parallel clean
  // view. Collects at least steps_target steps; pending chunks are flushed
  // into the buffer before returning so the buffer grows by exactly the
  // number of collected steps.
  DaggerRoundStats collect(const StudentNets& student, TeacherPolicy& teacher,
                           DaggerBuffer& buffer, int64_t steps_target, WorkerPool& pool);

  void set_gp_length_scale(double l);
  std::vector<envs::Env>& environments() { return envs_; }

 private:
  void start_chunk(int e, const TeacherPolicy& teacher);
  void push_frame(int e);

  int num_envs_;
  int window_;
  std::vector<envs::Env> envs_;
  std::vector<std::vector<double>> windows_;  // per env [window * kStudentDim]
  std::vector<EpisodeChunk> pending_;
  std::vector<bool> chunk_started_;
};

}  // namespace hpc::student
