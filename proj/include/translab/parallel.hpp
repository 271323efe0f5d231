#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace translab {

// Parallel width: TRANSLATOR_LAB_THREADS caps it, 0 or unset means auto.
inline int thread_cap() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("TRANSLATOR_LAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0) return std::min(cap, hw);
    }
    return hw;
}

// Static block partition over [0, n). Safe only for bodies with disjoint
// writes and no reductions; results are then bitwise independent of the
// partitioning.
template <typename Body>
void parallel_for(int n, Body&& body) {
    int width = std::min(thread_cap(), n);
    if (width <= 1 || n < 256) {
        for (int k = 0; k < n; ++k) body(k);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(width);
    int chunk = (n + width - 1) / width;
    for (int t = 0; t < width; ++t) {
        int lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (int k = lo; k < hi; ++k) body(k);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace translab
