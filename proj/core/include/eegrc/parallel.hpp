#pragma once

#include <cstddef>
#include <functional>

namespace eegrc {

/// Worker count from EEGRC_WORKERS, else the hardware concurrency (min 1).
/// Throws ConfigError for a malformed value.
int worker_count();

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index runs
/// exactly once; results must be written to per-index slots. The first
/// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int workers = 0);

}  // namespace eegrc
