#pragma once

#include <functional>

namespace wienerlab {

// Global worker cap for path-parallel loops; 0 means hardware concurrency.
void set_max_threads(int n);
int max_threads();

// Splits [0, n) into contiguous blocks, one worker per block. Workers must
// write disjoint data; results are deterministic because the partition
// depends only on n and the cap, never on scheduling.
void parallel_for(int n, const std::function<void(int begin, int end)>& body);

}  // namespace wienerlab
