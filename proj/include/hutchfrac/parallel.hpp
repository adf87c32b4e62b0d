#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace hutchfrac::parallel {

namespace detail {
inline std::atomic<unsigned>& configured_threads() {
  static std::atomic<unsigned> value{0};
  return value;
}
}  // namespace detail

/// Sets the worker count; 0 means "auto" (hardware concurrency).
inline void set_threads(unsigned n) { detail::configured_threads() = n; }

/// Worker count after applying HUTCHFRAC_THREADS, which wins over set_threads().
inline unsigned threads() {
  if (const char* env = std::getenv("HUTCHFRAC_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  unsigned n = detail::configured_threads();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

/// Calls fn(begin, end, chunk) over contiguous chunks of [0, n). Chunks are
/// assigned statically, so any order-independent reduction over chunk results
/// is deterministic regardless of the thread count.
template <typename Fn>
void for_chunks(std::size_t n, std::size_t min_chunk, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(threads(), std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_chunk)));
  if (workers <= 1) {
    fn(std::size_t{0}, n, std::size_t{0});
    return;
  }
  const std::size_t step = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * step;
    const std::size_t e = std::min(n, b + step);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e, w] { fn(b, e, w); });
  }
}

/// Number of chunks for_chunks will use for n items.
inline std::size_t chunk_count(std::size_t n, std::size_t min_chunk) {
  const std::size_t workers = std::min<std::size_t>(threads(), std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_chunk)));
  if (workers <= 1) return 1;
  const std::size_t step = (n + workers - 1) / workers;
  return (n + step - 1) / step;
}

}  // namespace hutchfrac::parallel
