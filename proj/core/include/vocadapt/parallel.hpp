#pragma once

#include <cstddef>
#include <functional>

namespace vocadapt {

/// Number of worker threads internal loops may use: hardware concurrency
/// capped by the VOCADAPT_THREADS environment variable (>= 1).
std::size_t worker_thread_count();

/// Runs fn(begin, end, chunk_index) over [0, n) split into contiguous
/// chunks, one chunk per worker. Chunk boundaries depend only on n and the
/// thread count, and callers combine per-chunk results in chunk order, so
/// parallel runs are byte-identical to sequential ones.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

std::size_t parallel_chunk_count(std::size_t n);

}  // namespace vocadapt
