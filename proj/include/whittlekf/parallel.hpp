#pragma once

//---------------------------------------------------------------------------
// Deterministic fork-join over an index range. WHITTLE_KF_THREADS caps the
// worker count (unset: hardware concurrency). Callers must write results
// into index-addressed slots so the output never depends on scheduling.
//---------------------------------------------------------------------------

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace whittlekf {

inline std::size_t thread_budget() {
  if (const char* env = std::getenv("WHITTLE_KF_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Runs fn(0) .. fn(n-1), possibly concurrently. The first exception thrown
// by any fn wins and is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min(thread_budget(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto run = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t k = 0; k + 1 < workers; ++k) pool.emplace_back(run);
  run();
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace whittlekf
