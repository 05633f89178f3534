#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace hpc {

// Persistent pool for index-parallel loops over independent work items.
// for_each(n, fn) calls fn(i) once for every i in [0, n) and returns when
// all calls are done. Items are claimed from an atomic counter, so results
// must not depend on which thread runs which index (all our uses keep
// per-index state). workers == 1 runs inline on the caller.
class WorkerPool {
 public:
  explicit WorkerPool(int workers);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  void for_each(int n, const std::function<void(int)>& fn);
  int workers() const { return workers_; }

 private:
  void worker_loop();

  int workers_ = 1;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_work_, cv_done_;
  const std::function<void(int)>* fn_ = nullptr;
  int n_ = 0;
  int next_ = 0;
  int active_ = 0;
  uint64_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace hpc
