#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace weylab {

/// Runs fn(i) for i in [0, n) over contiguous chunks, one per worker. Each
/// index must write only its own output slot, so results do not depend on
/// the number of workers.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t per = (n + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    const std::size_t first = t * per;
    const std::size_t last = std::min(n, first + per);
    pool.emplace_back([&fn, first, last] {
      for (std::size_t i = first; i < last; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// Pairwise sum with a fixed tree shape.
template <class T>
T pairwise_sum(const T* v, std::size_t n) {
  if (n == 0) return T{};
  if (n == 1) return v[0];
  const std::size_t mid = n / 2;
  return pairwise_sum(v, mid) + pairwise_sum(v + mid, n - mid);
}

}  // namespace weylab
