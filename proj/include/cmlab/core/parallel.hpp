#pragma once

#include <cstddef>

namespace cmlab {

// Worker thread count: CMLAB_THREADS env var when set, otherwise the OpenMP
// default (which itself honors OMP_NUM_THREADS).
int thread_count();

// Fixed chunk count used for deterministic parallel reductions. Work is split
// into kReduceChunks ranges regardless of thread count; each chunk accumulates
// into its own buffer and buffers are combined serially in chunk order, so
// results do not depend on how many threads ran.
inline constexpr int kReduceChunks = 64;

namespace detail {
void parallel_chunks_impl(std::size_t n, int chunks,
                          void (*trampoline)(void*, std::size_t, std::size_t, int), void* ctx);
}

// Runs fn(begin, end, chunk_index) over contiguous ranges covering [0, n).
// Chunk boundaries depend only on (n, chunks).
template <class F>
void parallel_chunks(std::size_t n, int chunks, F&& fn) {
  auto trampoline = [](void* ctx, std::size_t b, std::size_t e, int c) {
    (*static_cast<F*>(ctx))(b, e, c);
  };
  detail::parallel_chunks_impl(n, chunks, trampoline, &fn);
}

// Plain data-parallel loop, no cross-iteration state.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
  parallel_chunks(n, kReduceChunks, [&](std::size_t b, std::size_t e, int) {
    for (std::size_t i = b; i < e; ++i) fn(i);
  });
}

}  // namespace cmlab
