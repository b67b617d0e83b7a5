#pragma once

#include <cstddef>
#include <functional>

namespace chamberflow {

// Effective worker count: the explicit cap if one was set, else the
// CHAMBERFLOW_THREADS environment variable, else the hardware concurrency.
int thread_cap();
void set_thread_cap(int cap);  // cap <= 0 resets to automatic

// Runs fn(0) ... fn(count-1), possibly on several threads. Every index is
// executed exactly once and writes only its own slot in the caller's output,
// so results do not depend on the schedule. The first exception thrown by
// any worker is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace chamberflow
