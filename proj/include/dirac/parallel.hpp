#ifndef DIRAC_PARALLEL_HPP
#define DIRAC_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace dirac {

// Thread cap: DIRAC_SPECTRAL_THREADS if set, hardware concurrency otherwise.
inline int max_threads() {
    if (const char* env = std::getenv("DIRAC_SPECTRAL_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

// Static chunking: every index writes only its own slot, so results are
// identical for any thread count.
inline void parallel_for(long n, const std::function<void(long)>& body) {
    const int threads = std::min<long>(max_threads(), std::max<long>(n, 1));
    if (threads <= 1 || n < 2) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const long chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const long begin = t * chunk;
        const long end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &body] {
            for (long i = begin; i < end; ++i) body(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

} // namespace dirac

#endif
