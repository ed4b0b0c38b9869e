#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace svtail {

/// Runs fn(t) for every t in [0, count) over `jobs` workers (jobs <= 0 means
/// hardware concurrency). Work is keyed by the trial index alone, so results
/// written to per-trial slots are identical for any worker count.
inline void parallel_for(std::uint64_t count, int jobs,
                         const std::function<void(std::uint64_t)>& fn) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  if (jobs == 1 || count < 2) {
    for (std::uint64_t t = 0; t < count; ++t) fn(t);
    return;
  }
  const std::uint64_t workers = std::min<std::uint64_t>(static_cast<std::uint64_t>(jobs), count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::uint64_t w = 0; w < workers; ++w)
    pool.emplace_back([&fn, w, workers, count] {
      for (std::uint64_t t = w; t < count; t += workers) fn(t);
    });
  for (auto& th : pool) th.join();
}

}  // namespace svtail
