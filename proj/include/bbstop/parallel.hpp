// Minimal index-space parallel loop. Callers write results into
// preallocated per-index slots and reduce sequentially afterwards, so the
// outcome never depends on the worker count.
#pragma once

#include <cstddef>
#include <functional>

namespace bbstop {

// Worker count from the BBSTOP_WORKERS environment variable, falling back
// to the hardware concurrency.
int default_workers();

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace bbstop
