#pragma once

#include <cstddef>
#include <functional>

namespace fpkit {

// 0 or negative -> hardware concurrency.
int resolve_threads(int requested);

// Splits [0, n) into one contiguous chunk per worker and runs body(begin, end)
// on each. Callers must write results into preallocated slots keyed by index,
// which keeps output byte-identical for any thread count.
void parallel_for(size_t n, int threads,
                  const std::function<void(size_t, size_t)>& body);

}  // namespace fpkit
