#include "ghof/parallel.hpp"

#include <algorithm>

namespace ghof {

namespace {
int g_max_threads = 0;
}

void set_max_threads(int n) { g_max_threads = n; }

int max_threads() {
  if (g_max_threads > 0) return g_max_threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::int64_t n, std::int64_t chunk_size,
                  const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  if (chunk_size <= 0) chunk_size = 1;
  std::int64_t nchunks = (n + chunk_size - 1) / chunk_size;
  std::int64_t workers = std::min<std::int64_t>(max_threads(), nchunks);
  if (workers <= 1) {
    for (std::int64_t c = 0; c < nchunks; ++c) {
      std::int64_t b = c * chunk_size;
      fn(b, std::min(b + chunk_size, n));
    }
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto body = [&] {
    for (;;) {
      std::int64_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= nchunks) break;
      std::int64_t b = c * chunk_size;
      fn(b, std::min(b + chunk_size, n));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::int64_t t = 1; t < workers; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
}

}  // namespace ghof
