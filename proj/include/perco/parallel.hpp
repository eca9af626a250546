#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace perco {

// worker count: explicit request > PERCO_THREADS > hardware
inline std::uint32_t resolve_threads(std::uint32_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PERCO_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::uint32_t>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

// Replica-level parallelism only: tasks must write to disjoint slots so the
// result is identical for any worker count.
template <class Fn>
void parallel_for(std::uint64_t n, std::uint32_t threads, Fn&& fn) {
  std::uint64_t workers = std::min<std::uint64_t>(resolve_threads(threads), n);
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::uint64_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace perco
