#pragma once

#include <cstddef>
#include <functional>

namespace cohbudget {

/// Worker-thread cap: COHBUDGET_THREADS env var, 0 or unset = hardware auto.
unsigned thread_limit();

/// Runs fn(i) for i in [0, n) on up to thread_limit() threads with static
/// index striping. Callers write results by index, so the outcome does not
/// depend on the thread count. Exceptions from fn are rethrown in the caller.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

} // namespace cohbudget
