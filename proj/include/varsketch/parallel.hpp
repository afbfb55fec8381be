#pragma once

// Deterministic chunked parallelism.
//
// An index range is cut into fixed-size chunks (the chunk size comes from
// configuration, never from the thread count).  Worker t processes chunks
// t, t+T, t+2T, ...; every chunk is reduced sequentially inside itself and
// the per-chunk partials are folded by the caller in ascending chunk
// order.  Identical chunk boundaries + identical fold order means the
// result is bit-identical for any thread count, including 1.

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace varsketch {

struct ChunkRange {
    std::size_t index; // chunk number
    std::size_t begin; // first item
    std::size_t end;   // one past last item
};

inline std::size_t n_chunks(std::size_t n_items, std::size_t chunk_size) {
    return chunk_size == 0 ? 0 : (n_items + chunk_size - 1) / chunk_size;
}

// Applies `process` to every chunk of [0, n_items) and returns the
// partial results indexed by chunk number.  `process` must be callable
// concurrently on distinct chunks.
template <typename Partial, typename Process>
std::vector<Partial> map_chunks(std::size_t n_items, std::size_t chunk_size,
                                std::size_t n_threads, Process process) {
    const std::size_t chunks = n_chunks(n_items, chunk_size);
    std::vector<Partial> out(chunks);
    if (chunks == 0) return out;

    auto run_chunk = [&](std::size_t c) {
        ChunkRange range{c, c * chunk_size, std::min(n_items, (c + 1) * chunk_size)};
        out[c] = process(range);
    };

    const std::size_t workers = std::min(n_threads == 0 ? std::size_t(1) : n_threads, chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
        return out;
    }

    std::vector<std::exception_ptr> errors(chunks);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t c = t; c < chunks; c += workers) {
                try {
                    run_chunk(c);
                } catch (...) {
                    errors[c] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (std::size_t c = 0; c < chunks; ++c)
        if (errors[c]) std::rethrow_exception(errors[c]);
    return out;
}

} // namespace varsketch
