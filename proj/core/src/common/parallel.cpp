#include "hpc/common/parallel.hpp"

#include <algorithm>

namespace hpc {

WorkerPool::WorkerPool(int workers) : workers_(std::max(1, workers)) {
  for (int i = 0; i + 1 < workers_; ++i) threads_.emplace_back([this] { worker_loop(); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard<std::mutex> lk(mu_);
    stop_ = true;
  }
  cv_work_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::worker_loop() {
  uint64_t seen = 0;
  while (true) {
    const std::function<void(int)>* fn;
    {
      std::unique_lock<std::mutex> lk(mu_);
      cv_work_.wait(lk, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      fn = fn_;
      ++active_;
    }
    while (true) {
      int i;
      {
        std::lock_guard<std::mutex> lk(mu_);
        if (generation_ != seen || next_ >= n_) break;
        i = next_++;
      }
      (*fn)(i);
    }
    {
      std::lock_guard<std::mutex> lk(mu_);
      if (--active_ == 0 && next_ >= n_) cv_done_.notify_all();
    }
  }
}

void WorkerPool::for_each(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (threads_.empty()) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  {
    std::lock_guard<std::mutex> lk(mu_);
    fn_ = &fn;
    n_ = n;
    next_ = 0;
    ++generation_;
  }
  cv_work_.notify_all();
  // the caller pitches in as one worker
  while (true) {
    int i;
    {
      std::lock_guard<std::mutex> lk(mu_);
      if (next_ >= n_) break;
      i = next_++;
    }
    fn(i);
  }
  std::unique_lock<std::mutex> lk(mu_);
  cv_done_.wait(lk, [&] { return active_ == 0 && next_ >= n_; });
}

}  // namespace hpc
