#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace obstacle {

/// Paths are processed in blocks of this size; reductions combine block
/// partials in block order so results never depend on the thread count.
inline constexpr int kPathBlock = 4096;

inline int block_count(long items) { return static_cast<int>((items + kPathBlock - 1) / kPathBlock); }

/// Calls fn(block) for every block index in [0, blocks) on up to `threads`
/// workers. The first exception thrown by a worker is rethrown.
template <typename Fn>
void for_each_block(int blocks, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, std::max(1, blocks));
  if (threads == 1) {
    for (int b = 0; b < blocks; ++b) fn(b);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int b = next++; b < blocks; b = next++) {
      try {
        fn(b);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace obstacle
