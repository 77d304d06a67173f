#pragma once

#include <cstddef>
#include <functional>

namespace funcito {

/// Worker count: FUNCITO_THREADS when set (>= 1), hardware concurrency
/// otherwise.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) over `workers` threads in disjoint index
/// blocks. Callers store per-index results and reduce in index order
/// afterwards, so outputs do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t workers = 0);

}  // namespace funcito
