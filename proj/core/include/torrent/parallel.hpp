#pragma once

#include <functional>

#include "torrent/common.hpp"

namespace torrent {

// Worker count for cell/trial/grid parallelism; the TORRENT_THREADS
// environment variable overrides hardware concurrency.
Index work_pool_size();

// Runs fn(0..count-1) across the work pool. Tasks must write results into
// preallocated slots keyed by index, so parallelism never reorders output.
// The first exception thrown by a task is rethrown after all workers join.
void parallel_for(Index count, const std::function<void(Index)>& fn);

}  // namespace torrent
