#pragma once

#include <cstddef>
#include <functional>

namespace hjbac {

/// Sets the worker count; 0 restores the automatic choice
/// (HJBAC_THREADS env var if set, else the hardware count).
void set_threads(int n);
int thread_count();

/// Splits [0, n) into fixed-size chunks and runs fn(chunk_index, begin, end)
/// over them in parallel. Chunk boundaries depend only on n and chunk_size,
/// never on the worker count, so any reduction done in chunk-index order is
/// invariant to threading.
void parallel_chunks(std::size_t n, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

inline std::size_t chunk_count(std::size_t n, std::size_t chunk_size) {
  return (n + chunk_size - 1) / chunk_size;
}

}  // namespace hjbac
