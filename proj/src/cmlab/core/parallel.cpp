#include "cmlab/core/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

namespace cmlab {

int thread_count() {
  static const int cached = [] {
    if (const char* env = std::getenv("CMLAB_THREADS")) {
      const int n = std::atoi(env);
      if (n > 0) return n;
    }
    return omp_get_max_threads();
  }();
  return cached;
}

namespace detail {

void parallel_chunks_impl(std::size_t n, int chunks,
                          void (*trampoline)(void*, std::size_t, std::size_t, int), void* ctx) {
  if (n == 0) return;
  const int c = std::max(1, std::min<int>(chunks, static_cast<int>(n)));
  const std::size_t base = n / c;
  const std::size_t rem = n % c;
  const int threads = std::min(thread_count(), c);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (int k = 0; k < c; ++k) {
    const std::size_t extra = std::min<std::size_t>(k, rem);
    const std::size_t begin = k * base + extra;
    const std::size_t end = begin + base + (static_cast<std::size_t>(k) < rem ? 1 : 0);
    trampoline(ctx, begin, end, k);
  }
}

}  // namespace detail
}  // namespace cmlab
