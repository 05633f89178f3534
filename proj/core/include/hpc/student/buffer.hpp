#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "hpc/common/rng.hpp"
#include "hpc/sim/obs.hpp"
#include "hpc/student/student_config.hpp"

namespace hpc::student {

// A run of consecutive steps from one episode. prefix holds the window-1
// frames that preceded the chunk (zeros where the episode itself starts),
// so windows never cross chunk boundaries. teacher_h0/c0 snapshot the
// teacher's recurrent state at the first step, which lets stored labels be
// replayed bit-exactly from the chunk alone.
struct EpisodeChunk {
  int steps = 0;
  std::vector<double> obs;              // [steps * kStudentDim], corrupted
  std::vector<double> teacher_actions;  // [steps * kNumJoints]
  std::vector<double> targets;          // [steps * kReconDim]
  std::vector<double> privileged;       // [steps * kPrivilegedDim], clean
  std::vector<double> prefix;           // [(window-1) * kStudentDim]
  std::vector<double> teacher_h0, teacher_c0;
};

// Aggregated distillation dataset with whole-chunk FIFO eviction.
class DaggerBuffer {
 public:
  DaggerBuffer(int64_t capacity_steps, int window);

  void append(EpisodeChunk chunk);
  int64_t size_steps() const { return size_; }
  size_t chunks() const { return chunks_.size(); }
  const EpisodeChunk& chunk(size_t i) const { return chunks_[i]; }
  int window() const { return window_; }

  struct Ref {
    uint32_t chunk = 0;
    uint32_t step = 0;
  };
  Ref locate(int64_t flat) const;  // flat step index in [0, size_steps())
  Ref sample(Rng& rng) const {
    return locate(rng.uniform_int(0, static_cast<int>(size_) - 1));
  }

  // Copies the window ending at the referenced step, oldest frame first:
  // out must hold window * kStudentDim doubles.
  void fill_window(const Ref& ref, double* out) const;
  const double* teacher_action(const Ref& ref) const;
  const double* target(const Ref& ref) const;

 private:
  int64_t capacity_;
  int window_;
  int64_t size_ = 0;
  std::deque<EpisodeChunk> chunks_;
  std::vector<int64_t> cum_;  // cumulative step counts, rebuilt on change
};

}  // namespace hpc::student
