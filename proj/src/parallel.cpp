#include "ism/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace ism {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int threads) { g_threads.store(std::max(1, threads)); }

int thread_count() { return g_threads.load(); }

void configure_threads_from_env() {
  const char* raw = std::getenv("ISM_THREADS");
  if (raw == nullptr) return;
  try {
    set_thread_count(std::stoi(raw));
  } catch (const std::exception&) {
    set_thread_count(1);
  }
}

void parallel_rows(std::size_t rows, const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_count()), rows);
  if (workers <= 1) {
    for (std::size_t r = 0; r < rows; ++r) body(r);
    return;
  }
  // Strided assignment keeps the triangular loops roughly balanced.
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t r = w; r < rows; r += workers) body(r);
    });
  }
}

}  // namespace ism
