#pragma once

#include <cstdint>
#include <functional>

namespace mbs {

enum class ExecutionPolicy { serial, parallel };

// Thread budget for parallel regions. 0 means "auto" (all hardware threads).
// The MBS_LAB_THREADS environment variable, when set, takes precedence and is
// read once per query.
int thread_budget();

// Runs body(i) for i in [0, n). With ExecutionPolicy::parallel the iterations
// are distributed over OpenMP threads; results must not depend on iteration
// order. The serial policy is the reference implementation used in tests and
// benchmarks.
void parallel_for(std::int64_t n, ExecutionPolicy policy,
                  const std::function<void(std::int64_t)>& body);

}  // namespace mbs
