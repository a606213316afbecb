#pragma once

#include <cstddef>
#include <functional>

namespace sonarfield {

/// Worker cap: SONARFIELD_THREADS when set to a positive integer, otherwise
/// std::thread::hardware_concurrency() (at least 1).
unsigned worker_count();

/// Calls body(i) for every i in [0, n), split into contiguous chunks across
/// worker_count() threads. Each index is visited exactly once; callers write
/// per-index results and reduce them in index order to stay deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sonarfield
