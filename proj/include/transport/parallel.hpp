#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace transport {

// Worker count for a request: `requested <= 0` means "use all cores".  The
// TRANSPORT_THREADS environment variable caps the result in either case.
inline int resolve_threads(int requested) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* cap = std::getenv("TRANSPORT_THREADS")) {
    const int c = std::atoi(cap);
    if (c >= 1) n = std::min(n, c);
  }
  return n;
}

// Runs body(0..count-1) on a transient pool.  Tasks must be independent; the
// first exception (if any) is rethrown after all workers finish.
inline void parallel_for(int count, int threads,
                         const std::function<void(int)>& body) {
  threads = std::min(resolve_threads(threads), count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace transport
