#pragma once

#include <filesystem>
#include <string>

#include "hpc/config/config.hpp"
#include "hpc/student/nets.hpp"

namespace hpc::student {

struct StudentTrainResult {
  int updates = 0;
  int64_t steps_collected = 0;
  bool aborted = false;
  double initial_imitation = 0.0;  // mean over the first 10 updates
  double final_imitation = 0.0;    // mean over the last 10 updates
  double denoise_scan_mse = 0.0;   // decoder scan error on held-out buffer draws
  double identity_scan_mse = 0.0;  // corrupted-scan-vs-truth baseline, same draws
};

// Stage two for the full and no-world-model variants: alternate DAgger
// collection under sensor corruption with minibatch updates against the
// frozen teacher. Writes metrics.csv, periodic checkpoints and
// train_summary.json under out_dir; the final checkpoint is named after
// the variant (student.ckpt / student_no_wm.ckpt).
StudentTrainResult train_student(const config::RunConfig& cfg, Variant variant,
                                 const std::filesystem::path& teacher_ckpt, uint64_t seed,
                                 const std::string& out_dir, int workers);

// File name of the final checkpoint for a variant (also what eval expects).
std::string checkpoint_filename(Variant v);

}  // namespace hpc::student
