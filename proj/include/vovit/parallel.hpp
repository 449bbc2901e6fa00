// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <functional>

namespace vovit {

// Worker cap for batch-level parallelism: VOVIT_THREADS when set, otherwise
// the hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, n) across at most worker_count() threads. The first
// exception thrown by any task is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace vovit
