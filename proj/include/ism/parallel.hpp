#pragma once

#include <cstddef>
#include <functional>

namespace ism {

// Worker thread cap for row-parallel loops. Defaults to 1.
void set_thread_count(int threads);
int thread_count();

// Reads ISM_THREADS from the environment; absent or invalid leaves the cap at 1.
void configure_threads_from_env();

// Runs body(row) for row in [0, rows). Each row must write only to its own
// output slots so results do not depend on the thread count.
void parallel_rows(std::size_t rows, const std::function<void(std::size_t)>& body);

}  // namespace ism
