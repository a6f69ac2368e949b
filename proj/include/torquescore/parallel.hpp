#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace torquescore {

/// Run fn(i) for i in [0, n) on up to num_threads workers. Work items are
/// claimed from a shared atomic counter; callers must make fn(i) pure apart
/// from writing to its own output slot, so results do not depend on the
/// schedule.
inline void parallel_for(int n, int num_threads,
                         const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (num_threads <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  num_threads = std::min(num_threads, n);
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(num_threads);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < num_threads; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace torquescore
