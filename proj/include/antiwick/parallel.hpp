#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace aw {

namespace detail {
inline std::atomic<int>& thread_hint_storage() {
  static std::atomic<int> hint{1};
  return hint;
}
}  // namespace detail

/// Parallelism hint honoured by the data-parallel loops of the library.
/// Values below one are clamped to one.
inline void set_thread_hint(int threads) {
  detail::thread_hint_storage().store(std::max(1, threads));
}

inline int thread_hint() { return detail::thread_hint_storage().load(); }

// Procedure: parallel_for
//
// Calls body(i) for every i in [begin, end). Each index must write only to
// its own output slot; results are then independent of the thread count.
template <typename Body>
void parallel_for(std::size_t begin, std::size_t end, Body&& body) {
  if (end <= begin) return;
  const std::size_t count = end - begin;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_hint()), count);
  if (workers <= 1) {
    for (std::size_t i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = begin + w * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace aw
