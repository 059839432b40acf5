#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace optsub {

/// Number of worker threads used by parallel helpers. Defaults to the
/// hardware concurrency; OPTSUB_THREADS overrides it.
unsigned worker_threads();
void set_worker_threads(unsigned n);

/// Runs fn(block_index, begin, end) over fixed-size blocks of [0, n).
/// Block boundaries depend only on (n, block_size), never on the thread
/// count, so writers that key their output on block_index are
/// deterministic under any parallelism.
void parallel_blocks(std::size_t n, std::size_t block_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

/// Runs fn(i) for i in [0, n) on the worker pool; order unspecified.
void parallel_for_each(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace optsub
