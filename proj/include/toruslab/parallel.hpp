#pragma once

// Deterministic fork-join over trial indices. Each worker fills its own
// slots; the caller reduces them in index order, so the result never
// depends on the worker count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace toruslab {

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Calls body(i) for every i in [0, count) on up to `threads` workers.
/// Work is handed out in chunks; the first exception is rethrown.
template <class Body>
void parallel_for(std::uint64_t count, unsigned threads, Body body, std::uint64_t chunk = 64) {
  threads = std::max(1u, threads);
  if (threads == 1 || count <= chunk) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    try {
      for (;;) {
        if (failed.load(std::memory_order_relaxed)) return;
        const std::uint64_t lo = next.fetch_add(chunk);
        if (lo >= count) return;
        const std::uint64_t hi = std::min(count, lo + chunk);
        for (std::uint64_t i = lo; i < hi; ++i) body(i);
      }
    } catch (...) {
      if (!failed.exchange(true)) error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  const auto used = static_cast<unsigned>(std::min<std::uint64_t>(threads, (count + chunk - 1) / chunk));
  pool.reserve(used);
  for (unsigned t = 0; t < used; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Runs f(i) for all trials and returns the per-trial results in order.
template <class T, class F>
std::vector<T> map_trials(std::uint64_t count, unsigned threads, F f) {
  std::vector<T> out(count);
  parallel_for(count, threads, [&](std::uint64_t i) { out[i] = f(i); });
  return out;
}

}  // namespace toruslab
