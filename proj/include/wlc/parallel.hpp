#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace wlc {

/// Thread count: explicit request, else $WLC_THREADS, else hardware concurrency.
inline unsigned resolve_threads(unsigned requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("WLC_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for every i in [first, last). Work is handed out in chunks;
/// callers write results into per-index slots, so the outcome does not depend
/// on the thread count or on scheduling. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t first, std::size_t last, unsigned threads, Fn&& fn,
                  std::size_t chunk = 1) {
  if (last <= first) return;
  const std::size_t total = last - first;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), (total + chunk - 1) / chunk));
  if (workers <= 1) {
    for (std::size_t i = first; i < last; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{first};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t begin = next.fetch_add(chunk);
      if (begin >= last) return;
      const std::size_t end = std::min(last, begin + chunk);
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(last);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(body);
  body();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace wlc
