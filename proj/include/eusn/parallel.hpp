#pragma once

#include <cstddef>
#include <functional>

namespace eusn {

/// Worker count: `requested` if non-zero, else hardware concurrency; both
/// capped by the EUSN_THREADS environment variable when it is set.
std::size_t worker_count(std::size_t requested = 0);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Indices are
/// handed out dynamically; the first exception thrown is rethrown after all
/// workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace eusn
