#pragma once
#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace repcov {

/// Worker count actually used for a workload of the given size.
inline int resolve_threads(long total, int threads) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    return static_cast<int>(std::min<long>(threads, std::max(1L, total)));
}

/// Static contiguous partition of [0, total) across worker threads;
/// fn(begin, end, chunk_index) with chunk_index < resolve_threads(total,
/// threads). The partition depends only on (total, threads), and chunk
/// results must be merged order-independently by the caller, so outputs do
/// not depend on the thread count. The first chunk exception (by chunk
/// index) is rethrown.
inline void parallel_chunks(long total, int threads,
                            const std::function<void(long, long, int)>& fn) {
    if (total <= 0) return;
    threads = resolve_threads(total, threads);
    const long chunk = (total + threads - 1) / threads;
    if (threads == 1) {
        fn(0, total, 0);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        const long begin = t * chunk;
        const long end = std::min(total, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end, t] {
            try {
                fn(begin, end, t);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

} // namespace repcov
