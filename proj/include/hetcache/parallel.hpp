#pragma once

#include <cstddef>
#include <functional>

namespace hetcache {

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Each index runs exactly once; callers write results into
/// per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads = 0);

}  // namespace hetcache
