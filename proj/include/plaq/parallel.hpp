#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace plaq {

/// Default worker count: available parallelism, at least one.
inline int default_threads() {
  const auto hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Evaluates fn(i) for i in [0, n) on `threads` workers and returns the
/// results in index order. Results depend only on i, never on the schedule.
template <class Fn>
auto map_trials(std::uint64_t n, int threads, Fn&& fn) -> std::vector<decltype(fn(std::uint64_t{}))> {
  using T = decltype(fn(std::uint64_t{}));
  static_assert(!std::is_same_v<T, bool>, "vector<bool> elements cannot be written concurrently");
  std::vector<T> out(static_cast<std::size_t>(n));
  if (threads <= 0) threads = default_threads();
  threads = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), std::max<std::uint64_t>(n, 1)));
  if (threads == 1) {
    for (std::uint64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  constexpr std::uint64_t kChunk = 64;
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      try {
        for (;;) {
          const std::uint64_t begin = next.fetch_add(kChunk);
          if (begin >= n) break;
          const std::uint64_t end = std::min(n, begin + kChunk);
          for (std::uint64_t i = begin; i < end; ++i) out[static_cast<std::size_t>(i)] = fn(i);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace plaq
