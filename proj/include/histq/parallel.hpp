#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <thread>
#include <vector>

#include "histq/matrix.hpp"

namespace histq {

/// HISTQ_THREADS if set and positive, else hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) over static contiguous chunks. body must only
/// write to state owned by index i.
template <class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t workers = worker_count()) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
}

/// Pairwise sum with a fixed tree shape that depends only on the length.
complex tree_sum(std::span<const complex> values);

}  // namespace histq
