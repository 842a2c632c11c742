/*
Deterministic work distribution for Monte-Carlo loops.

Work is cut into fixed-size chunks; workers claim chunks from a shared
counter and write each chunk's partial result into its own slot. The caller
reduces the slots in chunk order, so floating-point accumulation order (and
therefore the result, bit for bit) does not depend on the worker count.
*/
#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace sskmlc {

inline int resolve_threads(int requested)
{
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

// fn(chunk_index, begin, end) -> T, for [begin, end) subranges of [0, total).
template <typename T, typename Fn>
std::vector<T> parallel_chunk_map(std::uint64_t total, std::uint64_t chunk_size, int threads, Fn&& fn)
{
    const std::uint64_t chunks = chunk_size == 0 ? 0 : (total + chunk_size - 1) / chunk_size;
    std::vector<T> results(chunks);
    if (chunks == 0) return results;

    const int workers = std::min<std::uint64_t>(resolve_threads(threads), chunks);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= chunks) return;
            const std::uint64_t begin = c * chunk_size;
            const std::uint64_t end = std::min(begin + chunk_size, total);
            results[c] = fn(c, begin, end);
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return results;
}

} // namespace sskmlc
