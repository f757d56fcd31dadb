#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace tln {

// Worker count from TLNUM_WORKERS, falling back to hardware concurrency.
int worker_count();

// Runs body(begin, end) over fixed-size chunks of [0, n). Chunk boundaries do
// not depend on the worker count, so per-chunk partial results reduced in
// chunk order are bit-identical for any number of workers.
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t chunk_index, std::size_t begin, std::size_t end)>& body);

inline std::size_t chunk_count(std::size_t n, std::size_t chunk) {
    return (n + chunk - 1) / chunk;
}

// Deterministic sum of n terms: fixed chunks, then a sequential reduction.
double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term, std::size_t chunk = 256);

// Same, max-reduction.
double parallel_max(std::size_t n, const std::function<double(std::size_t)>& term, std::size_t chunk = 256);

}
