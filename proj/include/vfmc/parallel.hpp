#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace vfmc {

struct ChunkRange {
    std::size_t index = 0;  ///< chunk number, reduction happens in this order
    std::int64_t begin = 0;
    std::int64_t end = 0;
};

inline std::size_t chunk_count(std::int64_t n_items, std::int64_t chunk_size) {
    if (n_items <= 0) return 0;
    return static_cast<std::size_t>((n_items + chunk_size - 1) / chunk_size);
}

/// Runs `work` over fixed-size index chunks. Chunk boundaries depend only on
/// (n_items, chunk_size), never on the worker count; workers pull chunks from
/// a shared counter and write results into caller-owned slots indexed by
/// chunk. Reducing those slots in index order afterwards gives bit-identical
/// results for any number of workers.
inline void run_chunked(std::int64_t n_items, std::int64_t chunk_size, int workers,
                        const std::function<void(const ChunkRange&)>& work) {
    if (n_items <= 0) return;
    const std::size_t n_chunks = chunk_count(n_items, chunk_size);
    auto run_chunk = [&](std::size_t c) {
        ChunkRange r;
        r.index = c;
        r.begin = static_cast<std::int64_t>(c) * chunk_size;
        r.end = std::min(n_items, r.begin + chunk_size);
        work(r);
    };
    if (workers <= 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            run_chunk(c);
        }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(workers, static_cast<int>(n_chunks));
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

inline constexpr std::int64_t kDefaultChunkSize = 4096;

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace vfmc
