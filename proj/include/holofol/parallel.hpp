#pragma once

// Static-partition parallel loop. Work item i goes to worker i*W/n, results
// land in caller-owned slots indexed by i, so output never depends on the
// worker count; reductions happen afterwards in index order.

#include <cstdint>
#include <thread>
#include <vector>

namespace holofol {

template <class Fn>
void parallel_for_ranges(int64_t n, int workers, const Fn& fn) {
    if (workers < 1) workers = 1;
    if (workers == 1 || n <= 1) {
        fn(0, n);
        return;
    }
    if (workers > n) workers = (int)n;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        int64_t lo = n * w / workers;
        int64_t hi = n * (w + 1) / workers;
        pool.emplace_back([&fn, lo, hi]() { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

} // namespace holofol
