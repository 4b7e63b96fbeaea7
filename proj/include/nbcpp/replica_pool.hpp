#pragma once

#include <cstdint>
#include <functional>

namespace nbcpp::pool {

// worker count: explicit > 0, else NBCPP_THREADS, else hardware concurrency
int resolve_threads(int requested);

// Runs fn(replica, worker) for replica in [0, n). Work is pulled from a
// shared counter; results must be written to replica-indexed slots so the
// outcome is independent of scheduling. The first exception is rethrown
// after all workers stop.
void run_indexed(std::int64_t n, int threads,
                 const std::function<void(std::int64_t, int)>& fn);

}  // namespace nbcpp::pool
