#pragma once

#include <cstddef>
#include <functional>

namespace rcdenoise {

/// Worker count: `requested` if nonzero, else hardware concurrency, capped by
/// the RC_DENOISE_THREADS environment variable when set.
[[nodiscard]] std::size_t resolve_jobs(std::size_t requested);

/// Calls body(i) for i in [0, count) on up to `jobs` threads. The first
/// exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body);

}  // namespace rcdenoise
