#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace condmean {

/// Trials per chunk. Chunk i of an experiment always draws from substream i,
/// so results depend on the chunk layout only, never on the worker count.
inline constexpr std::uint64_t kChunkTrials = 4096;

inline unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs `body(chunk, first_trial, count)` over contiguous chunks covering
/// [0, trials) on up to `workers` threads and returns the per-chunk partial
/// results in chunk order. Exceptions from workers are rethrown.
template <class Partial, class Body>
std::vector<Partial> run_chunks(std::uint64_t trials, unsigned workers,
                                Body&& body,
                                std::uint64_t chunk_trials = kChunkTrials) {
  const std::uint64_t chunks = (trials + chunk_trials - 1) / chunk_trials;
  std::vector<Partial> partials(chunks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::uint64_t chunk = next.fetch_add(1);
      if (chunk >= chunks) return;
      const std::uint64_t first = chunk * chunk_trials;
      const std::uint64_t count = std::min(chunk_trials, trials - first);
      try {
        partials[chunk] = body(chunk, first, count);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };

  const unsigned threads = static_cast<unsigned>(
      std::clamp<std::uint64_t>(workers, 1, std::max<std::uint64_t>(chunks, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return partials;
}

}  // namespace condmean
