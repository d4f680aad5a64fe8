#pragma once

#include <cstddef>
#include <functional>

namespace abcgof {

// Resolves a requested worker count: values < 1 mean "one worker".
int effective_threads(int requested);

// Calls body(i) for every i in [0, count) on up to `threads` workers. Each
// index is processed exactly once; bodies must write only to index-owned
// output. If any body throws, the exception from the lowest failing index is
// rethrown after all workers stop, so error reporting is also independent of
// scheduling.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace abcgof
