#pragma once

#include <cstddef>
#include <functional>

namespace fungrasp {

/// Worker cap for parallel_for. 0 restores the default: FUNGRASP_THREADS if
/// set, else the hardware concurrency.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Runs body(i) for i in [0, n). Results must be written by index; the first
/// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fungrasp
