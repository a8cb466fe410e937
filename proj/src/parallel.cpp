#include "nlhomog/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace nlhomog {

int resolve_thread_count(int requested) {
    if (const char* env = std::getenv("NLHOMOG_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::int64_t n, int threads,
                  const std::function<void(std::int64_t, std::int64_t)>& block_fn) {
    threads = static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(threads, n)));
    if (threads == 1 || n == 0) {
        if (n > 0) block_fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::int64_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        std::int64_t b = t * chunk;
        std::int64_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&block_fn, b, e] { block_fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace nlhomog
