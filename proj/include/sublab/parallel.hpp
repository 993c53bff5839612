// Deterministic work partitioning: items are split into fixed-size chunks and
// workers pull chunk indices from a shared counter. Chunk boundaries never
// depend on the worker count, so per-chunk results (and any reduction done in
// chunk order) are bit-identical at any thread count.
#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace sublab {

inline int& default_threads_slot() {
    static int value = 0; // 0 = hardware concurrency
    return value;
}

inline void set_default_threads(int n) { default_threads_slot() = n; }

inline int resolve_threads(int requested) {
    int n = requested > 0 ? requested : default_threads_slot();
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return n > 0 ? n : 1;
}

// body(chunk_index, begin, end)
template <typename Body>
void parallel_chunks(std::size_t n_items, std::size_t chunk_size, int threads, Body&& body) {
    if (n_items == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
    const int n_threads = std::min<std::size_t>(resolve_threads(threads), n_chunks);

    auto run_chunk = [&](std::size_t c) {
        const std::size_t begin = c * chunk_size;
        const std::size_t end = std::min(begin + chunk_size, n_items);
        body(c, begin, end);
    };

    if (n_threads <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= n_chunks) return;
                run_chunk(c);
            }
        });
    }
    for (auto& th : pool) th.join();
}

inline std::size_t chunk_count(std::size_t n_items, std::size_t chunk_size) {
    return chunk_size == 0 ? n_items : (n_items + chunk_size - 1) / chunk_size;
}

} // namespace sublab
