#pragma once

// Data-parallel loops over index ranges, cut into fixed chunks independent of
// the worker count.

#include <cstddef>
#include <functional>
#include <vector>

namespace sigma2 {

/// Worker cap from SIGMA2_LAB_THREADS (unset or 0 = hardware concurrency).
int worker_count();

inline constexpr std::size_t kChunk = 4096;

/// body(begin, end) over [0, count) in chunks of kChunk.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

/// Reduce chunk results in chunk order: combine(...combine(init, r₀), r₁)...
template <typename T, typename ChunkFn, typename Combine>
T chunked_reduce(std::size_t count, T init, ChunkFn chunk_fn, Combine combine) {
    const std::size_t chunks = (count + kChunk - 1) / kChunk;
    std::vector<T> partial(chunks, init);
    parallel_for(chunks * kChunk, [&](std::size_t b, std::size_t) {
        const std::size_t c = b / kChunk;
        partial[c] = chunk_fn(b, std::min(count, b + kChunk));
    });
    T acc = init;
    for (const T& p : partial) acc = combine(acc, p);
    return acc;
}

} // namespace sigma2
