#include "hpc/student/buffer.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace hpc::student {

DaggerBuffer::DaggerBuffer(int64_t capacity_steps, int window)
    : capacity_(capacity_steps), window_(window) {
  if (capacity_steps <= 0 || window <= 0)
    throw std::invalid_argument("buffer capacity and window must be positive");
}

void DaggerBuffer::append(EpisodeChunk chunk) {
  if (chunk.steps <= 0) return;
  size_ += chunk.steps;
  chunks_.push_back(std::move(chunk));
  while (size_ > capacity_ && chunks_.size() > 1) {
    size_ -= chunks_.front().steps;
    chunks_.pop_front();
  }
  cum_.resize(chunks_.size());
  int64_t acc = 0;
  for (size_t i = 0; i < chunks_.size(); ++i) {
    acc += chunks_[i].steps;
    cum_[i] = acc;
  }
}

DaggerBuffer::Ref DaggerBuffer::locate(int64_t flat) const {
  if (flat < 0 || flat >= size_) throw std::out_of_range("buffer index out of range");
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), flat);
  const size_t c = static_cast<size_t>(it - cum_.begin());
  const int64_t before = c == 0 ? 0 : cum_[c - 1];
  return {static_cast<uint32_t>(c), static_cast<uint32_t>(flat - before)};
}

void DaggerBuffer::fill_window(const Ref& ref, double* out) const {
  const EpisodeChunk& ch = chunks_[ref.chunk];
  const int d = sim::kStudentDim;
  for (int k = 0; k < window_; ++k) {
    const int f = static_cast<int>(ref.step) - (window_ - 1) + k;
    const double* src;
    if (f >= 0) {
      src = ch.obs.data() + static_cast<size_t>(f) * d;
    } else {
      src = ch.prefix.data() + static_cast<size_t>(window_ - 1 + f) * d;
    }
    std::memcpy(out + static_cast<size_t>(k) * d, src, sizeof(double) * d);
  }
}

const double* DaggerBuffer::teacher_action(const Ref& ref) const {
  return chunks_[ref.chunk].teacher_actions.data() +
         static_cast<size_t>(ref.step) * sim::kNumJoints;
}

const double* DaggerBuffer::target(const Ref& ref) const {
  return chunks_[ref.chunk].targets.data() + static_cast<size_t>(ref.step) * sim::kReconDim;
}

}  // namespace hpc::student
