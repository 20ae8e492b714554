#include "parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hjbac {

namespace {

std::atomic<int> g_threads{0};

int auto_threads() {
  if (const char* env = std::getenv("HJBAC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

void set_threads(int n) { g_threads.store(n < 0 ? 0 : n); }

int thread_count() {
  const int n = g_threads.load();
  return n > 0 ? n : auto_threads();
}

void parallel_chunks(std::size_t n, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t nchunks = chunk_count(n, chunk_size);
  const int workers = std::min<std::size_t>(thread_count(), nchunks);
  if (workers <= 1 || nchunks == 1) {
    for (std::size_t c = 0; c < nchunks; ++c) {
      fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    }
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
    const std::size_t b = static_cast<std::size_t>(c) * chunk_size;
    fn(static_cast<std::size_t>(c), b, std::min(n, b + chunk_size));
  }
#else
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= nchunks) return;
        fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
      }
    });
  }
  for (auto& t : pool) t.join();
#endif
}

}  // namespace hjbac
