#pragma once

#include <cstddef>
#include <functional>

namespace updrs {

/// Worker threads used by parallel_for. Defaults to the hardware concurrency.
void set_thread_count(std::size_t threads);
std::size_t thread_count();

/// Runs fn(0) ... fn(count - 1), possibly concurrently. Calls made from inside
/// a running parallel_for execute serially on the calling thread. If any call
/// throws, the exception from the lowest index is rethrown after all workers
/// finish. Callers write results into per-index slots so that any reduction
/// afterwards happens in a fixed order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace updrs
