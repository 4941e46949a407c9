#pragma once

// Replica-parallel execution. Workers receive replica indices and write into
// caller-owned slots, so results do not depend on the thread count.

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace percolab {

inline int default_thread_count() {
  if (const char* env = std::getenv("PERCOLAB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

template <class Fn>
void parallel_replicas(std::uint64_t count, int threads, Fn&& fn) {
  if (threads <= 0) threads = default_thread_count();
  if (count == 0) return;
  if (threads == 1 || count == 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::uint64_t nthreads = std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), count);
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(nthreads);
  for (std::uint64_t t = 0; t < nthreads; ++t) {
    std::uint64_t lo = count * t / nthreads;
    std::uint64_t hi = count * (t + 1) / nthreads;
    workers.emplace_back([&, lo, hi, t] {
      try {
        for (std::uint64_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace percolab
