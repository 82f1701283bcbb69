#pragma once

#include <functional>

namespace jmdm {

// Worker-thread cap for parallel regions. 0 restores the default
// (hardware concurrency). Thread count never changes results: parallel
// regions write disjoint output ranges and reductions run on the main
// thread in a fixed order.
void set_max_threads(int n);
int max_threads();

// Splits [begin, end) into contiguous chunks, one per worker, and runs
// fn(chunk_begin, chunk_end) on each. Runs inline when the range is
// small or only one worker is allowed.
void parallel_for(int begin, int end,
                  const std::function<void(int, int)>& fn);

}  // namespace jmdm
