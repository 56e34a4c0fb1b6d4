#pragma once

#include <functional>

namespace shl {

// Worker count: min(hardware, SHL_THREADS if set). Always >= 1.
int worker_count();

// Chunked parallel loop over [0, n). The body must write only to its own
// index's slots (results stay deterministic regardless of thread count).
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace shl
