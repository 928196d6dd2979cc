#pragma once

#include <cstddef>
#include <functional>

namespace mamv {

/// Worker count: MAMV_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int thread_count();

/// Calls body(i) for i in [0, count), split into contiguous blocks across
/// thread_count() threads. Rethrows the first exception by index order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace mamv
