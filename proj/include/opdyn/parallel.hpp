#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace opdyn {

/// Worker count used when a caller passes 0.
inline int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Splits [begin, end) into contiguous chunks, one per worker, and runs
/// fn(chunk_index, lo, hi) on each. Chunk boundaries depend only on the
/// worker count; callers merge per-chunk results in chunk order.
template <class F>
void for_chunks(std::int64_t begin, std::int64_t end, int workers, F&& fn) {
  const std::int64_t total = std::max<std::int64_t>(0, end - begin);
  const int w = static_cast<int>(std::clamp<std::int64_t>(resolve_workers(workers), 1, std::max<std::int64_t>(total, 1)));
  if (w == 1) {
    fn(0, begin, end);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex mu;
  const std::int64_t step = (total + w - 1) / w;
  for (int c = 0; c < w; ++c) {
    const std::int64_t lo = begin + c * step;
    const std::int64_t hi = std::min(end, lo + step);
    if (lo >= hi) break;
    pool.emplace_back([&, c, lo, hi] {
      try {
        fn(c, lo, hi);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace opdyn
