#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace aef {

inline std::size_t default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Calls fn(state, i) for i in [0, count) on up to `workers` threads, where
// each thread owns one `state` created by make_state(). Items are handed out
// dynamically; fn must only write to its state and to results owned by item i.
// The first exception thrown by any item is rethrown after all threads join.
template <typename MakeState, typename Fn>
void parallel_for_stateful(std::size_t count, std::size_t workers, MakeState&& make_state, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    auto state = make_state();
    for (std::size_t i = 0; i < count; ++i) fn(state, i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    try {
      auto state = make_state();
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(state, i);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(count);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  parallel_for_stateful(
      count, workers, [] { return 0; }, [&](int&, std::size_t i) { fn(i); });
}

}  // namespace aef
