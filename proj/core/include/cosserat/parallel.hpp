#pragma once

#include <cstddef>
#include <functional>

namespace cosserat {

// Worker count for data-parallel loops: hardware concurrency capped by the
// COSSERAT_KIN_THREADS environment variable (values < 1 mean 1).
std::size_t worker_count();

// Runs fn(begin, end) on contiguous index chunks, one chunk per worker.
// Chunk boundaries depend only on (n, workers), so writes to disjoint output
// slots and chunk-ordered reductions are bitwise deterministic for a fixed
// worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace cosserat
