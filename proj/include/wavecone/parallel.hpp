#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace wavecone {

// Worker count: min(hardware_concurrency, WAVECONE_THREADS if set). At least 1.
inline unsigned thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("WAVECONE_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  return hw;
}

// Runs fn(task) for task = 0..num_tasks-1 on the thread budget.
// Tasks must only write task-local state; callers merge results in task order
// afterwards so the outcome does not depend on scheduling.
inline void parallel_tasks(std::size_t num_tasks, const std::function<void(std::size_t)>& fn) {
  unsigned workers = thread_budget();
  if (workers <= 1 || num_tasks <= 1) {
    for (std::size_t t = 0; t < num_tasks; ++t) fn(t);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t t = next.fetch_add(1);
        if (t >= num_tasks) return;
        fn(t);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace wavecone
