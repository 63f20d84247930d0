#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ocf {

/// Trials are grouped into fixed-size blocks so that results can be reduced
/// in block order no matter how many workers ran them.
inline constexpr std::size_t kTrialBlock = 256;

inline std::size_t ResolveJobs(std::size_t jobs) {
  if (jobs != 0) return jobs;
  std::size_t hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Calls fn(block, first_trial, end_trial) once per block, spread over `jobs`
/// threads (0 = all cores). The first exception thrown by any block is
/// rethrown after every worker has stopped.
inline void ForEachBlock(std::size_t trials, std::size_t jobs,
                         const std::function<void(std::size_t, std::size_t, std::size_t)>& fn,
                         std::size_t block = kTrialBlock) {
  const std::size_t n_blocks = (trials + block - 1) / block;
  jobs = std::min(ResolveJobs(jobs), std::max<std::size_t>(n_blocks, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      try {
        fn(b, b * block, std::min(trials, (b + 1) * block));
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(n_blocks);
        return;
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace ocf
