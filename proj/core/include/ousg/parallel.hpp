#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace ousg {

/// Global worker count used by the batched loops below. 0 = hardware default.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs fn(batch_index) for batch_index in [0, n_batches). Batches are a fixed
/// decomposition of the work, so any per-batch accumulators can be reduced in
/// batch order afterwards and the result is independent of the thread count.
inline void parallel_for_batches(std::size_t n_batches, const std::function<void(std::size_t)>& fn) {
  unsigned workers = thread_count();
  if (workers <= 1 || n_batches <= 1) {
    for (std::size_t b = 0; b < n_batches; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= n_batches) return;
      fn(b);
    }
  };
  std::vector<std::thread> pool;
  unsigned spawn = workers < n_batches ? workers : static_cast<unsigned>(n_batches);
  pool.reserve(spawn);
  for (unsigned i = 0; i < spawn; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

namespace detail {
inline unsigned& thread_count_ref() {
  static unsigned count = 0;
  return count;
}
}  // namespace detail

inline void set_thread_count(unsigned n) { detail::thread_count_ref() = n; }

inline unsigned thread_count() {
  unsigned n = detail::thread_count_ref();
  if (n == 0) {
    n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
  }
  return n;
}

}  // namespace ousg
