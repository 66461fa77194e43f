#include "mbs/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mbs {

int thread_budget() {
  int budget = 0;
  if (const char* env = std::getenv("MBS_LAB_THREADS")) {
    try {
      budget = std::stoi(env);
    } catch (...) {
      budget = 0;
    }
    if (budget < 0) budget = 0;
  }
  if (budget == 0) {
    unsigned hw = std::thread::hardware_concurrency();
    budget = hw == 0 ? 1 : static_cast<int>(hw);
  }
  return budget;
}

void parallel_for(std::int64_t n, ExecutionPolicy policy,
                  const std::function<void(std::int64_t)>& body) {
  if (n <= 0) return;
#ifdef _OPENMP
  if (policy == ExecutionPolicy::parallel) {
    const int threads = thread_budget();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
#else
  (void)policy;
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace mbs
