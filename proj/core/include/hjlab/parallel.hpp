#pragma once

#include <cstddef>
#include <functional>

namespace hjlab {

// Worker count: HJ_FRONT_THREADS if set and positive, else hardware concurrency.
int worker_count();

// Calls body(begin, end) on contiguous chunks of [0, n), possibly in parallel.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace hjlab
