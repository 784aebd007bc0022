#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace ghof {

// Global worker cap (CLI --threads). 0 means hardware concurrency.
void set_max_threads(int n);
int max_threads();

// Runs fn(begin, end) over fixed-size chunks of [0, n). The chunk grid
// depends only on chunk_size, never on the worker count, so any fn that
// writes disjoint output slots per index gives identical results for any
// thread cap.
void parallel_for(std::int64_t n, std::int64_t chunk_size,
                  const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace ghof
