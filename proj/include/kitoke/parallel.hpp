#pragma once

#include <cstddef>
#include <functional>

namespace kitoke {

struct ExecOptions {
    // 0 = take KITOKE_THREADS from the environment, else hardware concurrency.
    unsigned threads = 0;
};

unsigned resolve_threads(const ExecOptions& options);

// Runs body(i) for i in [0, count) on up to `threads` workers. Work items are
// handed out dynamically, so body must not depend on which worker runs it.
// The first exception thrown by any item is rethrown on the caller's thread.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace kitoke
