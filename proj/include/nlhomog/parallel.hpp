#ifndef NLHOMOG_PARALLEL_HPP
#define NLHOMOG_PARALLEL_HPP

#include <cstdint>
#include <functional>

namespace nlhomog {

// Resolves a requested worker count: 0 means auto (hardware concurrency),
// NLHOMOG_THREADS in the environment overrides everything.
int resolve_thread_count(int requested);

// Fork-join over [0, n) in contiguous blocks. Workers must write to disjoint
// slots; reductions stay sequential elsewhere so reported numbers do not
// depend on the worker count.
void parallel_for(std::int64_t n, int threads,
                  const std::function<void(std::int64_t, std::int64_t)>& block_fn);

}  // namespace nlhomog

#endif
