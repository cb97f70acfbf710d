#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace moyal {

/// Number of worker threads used by the quadrature kernels.
///
/// Defaults to the hardware concurrency; the MOYAL_THREADS environment
/// variable caps it.
inline int thread_count() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("MOYAL_THREADS")) {
    try {
      int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, cap);
    } catch (...) {
    }
  }
  return n;
}

/// Runs body(begin, end) over contiguous blocks of [0, n).
///
/// Blocks write to disjoint outputs, so results do not depend on the number
/// of threads.
template <class Body>
void parallel_blocks(std::size_t n, Body&& body) {
  if (n == 0) return;
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * block;
    const std::size_t hi = std::min(n, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

/// Splits [0, n) into a fixed number of chunks and runs body(chunk, begin,
/// end) for each. The chunk layout depends only on n and `chunks`, never on
/// the thread count, so per-chunk partial sums reduced in chunk order are
/// bit-reproducible.
template <class Body>
void parallel_chunks(std::size_t n, std::size_t chunks, Body&& body) {
  chunks = std::max<std::size_t>(1, std::min(chunks, n));
  const std::size_t per = (n + chunks - 1) / chunks;
  parallel_blocks(chunks, [&](std::size_t c0, std::size_t c1) {
    for (std::size_t c = c0; c < c1; ++c) {
      const std::size_t lo = c * per;
      const std::size_t hi = std::min(n, lo + per);
      if (lo < hi) body(c, lo, hi);
    }
  });
}

}  // namespace moyal
