#pragma once
// Index-space parallel map. QGRAPH_THREADS caps the worker count; results are
// written into preallocated slots so the output is deterministic regardless
// of scheduling.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace qgraph {

inline int max_threads() {
  if (const char* env = std::getenv("QGRAPH_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

template <class F>
void parallel_for(int n, F&& body) {
  const int workers = std::min(max_threads(), std::max(1, n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace qgraph
