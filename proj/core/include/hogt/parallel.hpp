#pragma once

#include <cstddef>
#include <functional>

namespace hogt {

// Worker count: HOGT_THREADS if set, otherwise hardware concurrency. Read once per process.
std::size_t worker_count();

// Runs body(begin, end) over disjoint fixed-size chunks of [0, n). Each index is
// visited exactly once, so writes to per-index slots are deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 256);

}  // namespace hogt
