#include "wordrep/threadpool.hpp"

namespace wordrep {

ThreadPool::ThreadPool(int threads) {
  int n = threads;
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  workers_.reserve(static_cast<size_t>(n - 1));
  for (int i = 1; i < n; ++i) {
    workers_.emplace_back([this, i] { worker_loop(i); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  cv_start_.notify_all();
  for (auto& w : workers_) w.join();
}

std::pair<size_t, size_t> ThreadPool::chunk_bounds(size_t n, int chunks, int idx) {
  const size_t lo = n * static_cast<size_t>(idx) / static_cast<size_t>(chunks);
  const size_t hi = n * static_cast<size_t>(idx + 1) / static_cast<size_t>(chunks);
  return {lo, hi};
}

void ThreadPool::parallel_for(size_t n, const std::function<void(size_t, size_t, int)>& body) {
  if (n == 0) return;
  const int chunks = size();
  if (chunks == 1) {
    body(0, n, 0);
    return;
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    job_ = &body;
    job_n_ = n;
    pending_ = chunks - 1;
    error_ = nullptr;
    ++generation_;
  }
  cv_start_.notify_all();

  try {
    auto [lo, hi] = chunk_bounds(n, chunks, 0);
    if (lo < hi) body(lo, hi, 0);
  } catch (...) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!error_) error_ = std::current_exception();
  }

  std::unique_lock<std::mutex> lock(mu_);
  cv_done_.wait(lock, [this] { return pending_ == 0; });
  job_ = nullptr;
  if (error_) std::rethrow_exception(error_);
}

void ThreadPool::worker_loop(int idx) {
  uint64_t seen = 0;
  for (;;) {
    const std::function<void(size_t, size_t, int)>* job = nullptr;
    size_t n = 0;
    {
      std::unique_lock<std::mutex> lock(mu_);
      cv_start_.wait(lock, [this, &seen] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      job = job_;
      n = job_n_;
    }
    try {
      auto [lo, hi] = chunk_bounds(n, size(), idx);
      if (lo < hi) (*job)(lo, hi, idx);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu_);
      if (!error_) error_ = std::current_exception();
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (--pending_ == 0) cv_done_.notify_all();
    }
  }
}

}  // namespace wordrep
