// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace ccloth {

// Worker threads used by the parallel loops below. Defaults to hardware
// concurrency capped by the CONTOUR_THREADS environment variable.
int workerThreads();
void setWorkerThreads(int n);

// Runs fn(chunkIndex, begin, end) over [0, count) split into fixed-size
// chunks. Chunking depends only on count and chunkSize, never on the pool
// size, so per-chunk results merged in chunk order are bitwise reproducible
// for any thread count.
void parallelChunks(std::size_t count, std::size_t chunkSize,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

std::size_t chunkCount(std::size_t count, std::size_t chunkSize);

}  // namespace ccloth
