#pragma once

#include <functional>

namespace psfs {

// Process-wide worker count for pixel-parallel loops. 0 resets to the
// hardware concurrency. Results never depend on this value; kernels are
// written so that any contiguous row partition produces identical bits.
void set_thread_count(int n);
int thread_count();

// Runs fn(row_begin, row_end) over a contiguous partition of [0, rows).
void parallel_rows(int rows, const std::function<void(int, int)>& fn);

}  // namespace psfs
