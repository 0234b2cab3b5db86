#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace cdl {

inline int default_thread_count() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

inline int& thread_cap() {
    static int cap = 0;  // 0 = use hardware concurrency
    return cap;
}

/// Caps the worker pool used by parallel_for (0 restores the default).
inline void set_thread_cap(int threads) { thread_cap() = threads; }

/// Runs fn(i) for i in [0, count). Work is handed out in fixed-size chunks;
/// each index is processed exactly once, so writes to per-index slots are
/// deterministic regardless of the number of workers.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    int threads = thread_cap() > 0 ? thread_cap() : default_thread_count();
    threads = std::max(1, std::min<int>(threads, static_cast<int>(count)));
    if (threads == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const std::size_t chunk = std::max<std::size_t>(1, count / (8 * threads));
    auto worker = [&]() {
        for (;;) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= count) return;
            const std::size_t end = std::min(count, begin + chunk);
            for (std::size_t i = begin; i < end; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (int w = 1; w < threads; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

}  // namespace cdl
