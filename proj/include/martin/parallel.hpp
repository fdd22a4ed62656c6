#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace martin {

/// Worker count: MARTIN_THREADS if set and positive, else 1.
inline int thread_count() {
  if (const char* env = std::getenv("MARTIN_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return 1;
}

/// Runs fn(begin, end) over contiguous chunks of [0, n). Chunk boundaries depend
/// only on n and the thread count, so per-index results are deterministic.
template <class Fn>
void parallel_for(long n, int threads, Fn&& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || n < 4096) {
    fn(0L, n);
    return;
  }
  std::vector<std::jthread> pool;
  const long chunk = (n + threads - 1) / threads;
  for (long begin = 0; begin < n; begin += chunk) {
    const long end = std::min(n, begin + chunk);
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

}  // namespace martin
