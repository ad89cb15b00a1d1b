#pragma once

#include <cstddef>
#include <functional>

namespace dtem {

// Number of worker threads to use for `requested` (0 = hardware concurrency).
int resolve_threads(int requested);

// Runs body(i) for i in [0, n) on a static contiguous partition over
// `threads` workers. The first exception thrown by any worker is rethrown.
// Callers write results into per-index slots, so output never depends on the
// thread count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace dtem
