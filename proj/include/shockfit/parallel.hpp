#pragma once

#include <cstddef>
#include <functional>

namespace shockfit {

// Worker count from SHOCKFIT_THREADS, else hardware concurrency.
int worker_count();

// Calls body(i) for i in [0, n). Each index is handled by exactly one worker,
// so results written per index do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace shockfit
