#pragma once

#include <cstddef>
#include <functional>

namespace hamred {

/// Worker count: HAMRED_THREADS if set to a positive integer, else the
/// hardware concurrency (at least 1).
unsigned thread_count();

/// Runs body(i) for i in [0, count) on up to thread_count() threads. Each index
/// runs exactly once; if any throw, the exception of the lowest failing index
/// is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace hamred
