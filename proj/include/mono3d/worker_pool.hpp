#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace mono3d {

// Fixed-size pool dispatching contiguous index ranges. Chunk i of [0, n) is
// [i*n/p, (i+1)*n/p), a pure function of (n, p, i), so work placement never
// depends on timing and per-item results are identical for any worker count.
class WorkerPool {
 public:
  explicit WorkerPool(unsigned workers);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  unsigned worker_count() const { return workers_; }

  static std::pair<std::size_t, std::size_t> chunk_range(std::size_t n, unsigned workers,
                                                         unsigned chunk);

  // Runs fn(begin, end) once per chunk, chunk 0 on the calling thread.
  // Blocks until every chunk finished; rethrows the first worker exception.
  void run(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) const;

 private:
  void worker_loop(unsigned index);

  unsigned workers_;
  std::vector<std::thread> threads_;

  mutable std::mutex mutex_;
  mutable std::condition_variable start_cv_;
  mutable std::condition_variable done_cv_;
  mutable std::uint64_t generation_ = 0;
  mutable std::size_t task_n_ = 0;
  mutable const std::function<void(std::size_t, std::size_t)>* task_fn_ = nullptr;
  mutable unsigned pending_ = 0;
  mutable std::exception_ptr first_error_;
  bool stopping_ = false;
};

}  // namespace mono3d
