#pragma once

#include <cstddef>
#include <functional>

namespace pitest {

/// Worker count used when a caller passes workers <= 0.
int default_workers();

/**
 * Runs task(0..count-1) on up to `workers` OpenMP threads. Tasks must only
 * write their own outputs. If tasks throw, the exception of the lowest
 * failing index is rethrown after all tasks finish.
 */
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task);

/// Reference implementation: same contract, one thread, index order.
void serial_for(std::size_t count, const std::function<void(std::size_t)>& task);

} // namespace pitest
