#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace hurstlab {

inline int default_threads() {
    if (const char* env = std::getenv("HURSTLAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Static block partition over [0, n). Each index is processed exactly once and
// workers must write only to their own slots, so results do not depend on the
// thread count.
template <class F>
void parallel_for(std::size_t n, int threads, const F& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        const std::size_t lo = n * t / nt;
        const std::size_t hi = n * (t + 1) / nt;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace hurstlab
