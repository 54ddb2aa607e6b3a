#include "vocadapt/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace vocadapt {

std::size_t worker_thread_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("VOCADAPT_THREADS")) {
    const long parsed = std::strtol(cap, nullptr, 10);
    if (parsed >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(parsed));
  }
  return n;
}

std::size_t parallel_chunk_count(std::size_t n) {
  return std::max<std::size_t>(1, std::min(worker_thread_count(), n));
}

void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t chunks = parallel_chunk_count(n);
  if (chunks == 1) {
    fn(0, n, 0);
    return;
  }
  const std::size_t per_chunk = (n + chunks - 1) / chunks;
  std::vector<std::thread> workers;
  workers.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = c * per_chunk;
    const std::size_t end = std::min(n, begin + per_chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end, c] { fn(begin, end, c); });
  }
  for (std::thread& t : workers) t.join();
}

}  // namespace vocadapt
