#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rotorfluc {

// Worker count: hardware concurrency unless ROTORFLUC_THREADS is set
// to a positive integer, which then takes over (in either direction;
// results never depend on it).
inline unsigned worker_count() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("ROTORFLUC_THREADS")) {
    const long req = std::strtol(env, nullptr, 10);
    if (req > 0) n = unsigned(req);
  }
  return n;
}

// Runs fn(i) for i in [0, n) on a pool of workers pulling indices from
// a shared counter.  fn must only write to state owned by index i; with
// that discipline results are identical for any thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Like parallel_for, but hands fn the worker's pool slot as a second
// argument so it can own per-worker scratch.  Only results that are
// order-independent (integer tallies) may live in that scratch; float
// accumulation must stay keyed to i.
template <typename Fn>
void parallel_for_worker(std::size_t n, unsigned max_workers, Fn&& fn) {
  const unsigned workers =
      std::min<std::size_t>(std::min(worker_count(), max_workers), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i, 0u);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i, w);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rotorfluc
