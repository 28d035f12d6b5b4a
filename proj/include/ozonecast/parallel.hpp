#pragma once

#include <cstddef>
#include <functional>

namespace ozonecast {

/// Global worker count for parallel_for. Defaults to the hardware
/// concurrency; set to 1 to force sequential execution.
int thread_count();
void set_thread_count(int n);

/// Runs fn(i) for i in [0, n). Tasks must write only to their own output
/// slots; given that, results are identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ozonecast
