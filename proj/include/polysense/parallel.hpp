#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace polysense::par {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(t) for t in [0, k), one thread per task.
template <typename Fn>
void run_tasks(std::size_t k, Fn&& fn) {
    if (k <= 1) {
        if (k == 1) fn(std::size_t{0});
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(k);
    for (std::size_t t = 0; t < k; ++t) pool.emplace_back([&fn, t] { fn(t); });
    for (auto& th : pool) th.join();
}

/// Runs fn(begin, end) over disjoint chunks of [0, n). Results must be
/// written to per-index slots (or otherwise combined order-independently)
/// so the chunk count never affects the outcome.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n < 2048) {
        fn(std::size_t{0}, n);
        return;
    }
    std::size_t nthreads = static_cast<std::size_t>(threads);
    std::size_t chunk = (n + nthreads - 1) / nthreads;
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = lo + chunk < n ? lo + chunk : n;
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace polysense::par
