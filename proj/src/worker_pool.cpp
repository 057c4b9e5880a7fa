#include "mono3d/worker_pool.hpp"

#include <cstdint>

#include "mono3d/errors.hpp"

namespace mono3d {

WorkerPool::WorkerPool(unsigned workers) : workers_(workers) {
  if (workers_ < 1) throw InvalidInput("worker count must be >= 1");
  threads_.reserve(workers_ - 1);
  for (unsigned i = 1; i < workers_; ++i)
    threads_.emplace_back([this, i] { worker_loop(i); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  start_cv_.notify_all();
  for (std::thread& t : threads_) t.join();
}

std::pair<std::size_t, std::size_t> WorkerPool::chunk_range(std::size_t n, unsigned workers,
                                                            unsigned chunk) {
  const std::size_t p = workers;
  const std::size_t i = chunk;
  return {i * n / p, (i + 1) * n / p};
}

void WorkerPool::run(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn) const {
  if (workers_ == 1) {
    fn(0, n);
    return;
  }
  {
    std::lock_guard lock(mutex_);
    task_n_ = n;
    task_fn_ = &fn;
    pending_ = workers_ - 1;
    first_error_ = nullptr;
    ++generation_;
  }
  start_cv_.notify_all();

  const auto [begin, end] = chunk_range(n, workers_, 0);
  std::exception_ptr local_error;
  try {
    if (begin < end) fn(begin, end);
  } catch (...) {
    local_error = std::current_exception();
  }

  std::unique_lock lock(mutex_);
  done_cv_.wait(lock, [this] { return pending_ == 0; });
  task_fn_ = nullptr;
  if (!first_error_ && local_error) first_error_ = local_error;
  if (first_error_) std::rethrow_exception(first_error_);
}

void WorkerPool::worker_loop(unsigned index) {
  std::uint64_t seen = 0;
  for (;;) {
    const std::function<void(std::size_t, std::size_t)>* fn = nullptr;
    std::size_t n = 0;
    {
      std::unique_lock lock(mutex_);
      start_cv_.wait(lock, [&] { return stopping_ || generation_ != seen; });
      if (stopping_) return;
      seen = generation_;
      fn = task_fn_;
      n = task_n_;
    }
    const auto [begin, end] = chunk_range(n, workers_, index);
    std::exception_ptr error;
    try {
      if (begin < end) (*fn)(begin, end);
    } catch (...) {
      error = std::current_exception();
    }
    {
      std::lock_guard lock(mutex_);
      if (error && !first_error_) first_error_ = error;
      --pending_;
    }
    done_cv_.notify_one();
  }
}

}  // namespace mono3d
