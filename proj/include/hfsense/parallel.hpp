#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace hfsense {

// Worker cap for parallel_for. Results never depend on it: each item is
// computed independently and written to its own slot.
void set_max_threads(int n);
int max_threads();

// Runs fn(i) for i in [0, n). fn must only write to per-index state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hfsense
