#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stablewalk {

/// Runs body(i) for i in [0, count) on `workers` threads pulling from a shared
/// counter. Callers write results into slot i, so the merged output never
/// depends on scheduling. The first exception (lowest index) is rethrown.
template <class Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
  workers = std::max(1, workers);
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  std::size_t err_index = count;
  auto run = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n = static_cast<std::size_t>(workers) < count ? workers : static_cast<int>(count);
  for (int w = 1; w < n; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace stablewalk
