// SPDX-License-Identifier: Apache-2.0
#include "ccloth/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace ccloth {

namespace {

int defaultThreads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* cap = std::getenv("CONTOUR_THREADS")) {
    int c = std::atoi(cap);
    if (c >= 1) n = std::min(n, c);
  }
  return n;
}

int& threadSetting() {
  static int n = defaultThreads();
  return n;
}

}  // namespace

int workerThreads() { return threadSetting(); }

void setWorkerThreads(int n) { threadSetting() = std::max(1, n); }

std::size_t chunkCount(std::size_t count, std::size_t chunkSize) {
  if (count == 0) return 0;
  if (chunkSize == 0) chunkSize = 1;
  return (count + chunkSize - 1) / chunkSize;
}

void parallelChunks(std::size_t count, std::size_t chunkSize,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (count == 0) return;
  if (chunkSize == 0) chunkSize = 1;
  const std::size_t chunks = chunkCount(count, chunkSize);
  const int threads = std::min<std::size_t>(workerThreads(), chunks);

  auto runChunk = [&](std::size_t c) {
    const std::size_t lo = c * chunkSize;
    const std::size_t hi = std::min(count, lo + chunkSize);
    fn(c, lo, hi);
  };

  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) runChunk(c);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= chunks) return;
        runChunk(c);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace ccloth
