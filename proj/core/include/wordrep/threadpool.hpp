#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace wordrep {

// Persistent worker pool with a static-chunk parallel_for. Chunk boundaries
// are a pure function of (n, size()), so any reduction that combines
// per-chunk results in chunk order is reproducible at a fixed thread count.
class ThreadPool {
 public:
  explicit ThreadPool(int threads = 0);  // 0 = hardware concurrency
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int size() const { return static_cast<int>(workers_.size()) + 1; }

  // body(begin, end, chunk_index); chunk_index in [0, size()).
  // The calling thread runs chunk 0. The first exception thrown by any chunk
  // is rethrown on the caller.
  void parallel_for(size_t n, const std::function<void(size_t, size_t, int)>& body);

  static std::pair<size_t, size_t> chunk_bounds(size_t n, int chunks, int idx);

 private:
  void worker_loop(int idx);

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_start_;
  std::condition_variable cv_done_;
  const std::function<void(size_t, size_t, int)>* job_ = nullptr;
  size_t job_n_ = 0;
  uint64_t generation_ = 0;
  int pending_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace wordrep
