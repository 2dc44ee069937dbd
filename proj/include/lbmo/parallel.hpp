#pragma once

#include <cstddef>
#include <functional>

namespace lbmo {

/// Worker cap: LBMO_EULER_THREADS when set to a positive integer, otherwise
/// std::thread::hardware_concurrency() (at least 1).
unsigned worker_count();

/// Runs body(k) for k in [0, n) on up to worker_count() threads using a static
/// block partition. Callers write results to disjoint slots and reduce
/// afterwards, so the result never depends on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace lbmo
