#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace unital {

/// 0 means "one worker per hardware thread".
inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

/// Runs fn(i, worker) for every i in [begin, end) with indices handed out
/// dynamically. Callers merge per-worker state themselves; the first
/// exception thrown by any worker is rethrown.
template <class Fn>
void parallel_for(int begin, int end, unsigned threads, Fn&& fn) {
  const unsigned workers = std::min<unsigned>(resolve_threads(threads),
                                              static_cast<unsigned>(std::max(1, end - begin)));
  if (workers <= 1) {
    for (int i = begin; i < end; ++i) fn(i, 0U);
    return;
  }
  std::atomic<int> next{begin};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next++; i < end && !failed; i = next++) fn(i, w);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace unital
