#pragma once

#include <cstddef>
#include <functional>

namespace confrank {

// Worker cap from CONFRANK_THREADS (0 or unset = hardware concurrency).
unsigned thread_cap();

// Runs fn(begin, end) over disjoint chunks of [0, n), possibly in parallel.
// Callers must only write to slots they own; there is no reduction here.
void parallel_for(size_t n, const std::function<void(size_t, size_t)>& fn);

}  // namespace confrank
