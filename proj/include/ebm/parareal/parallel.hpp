#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ebm::parareal {

/// Calls task(i) for i in [0, count) on up to `workers` threads. Results must
/// be written by index; the first failure (lowest index) is rethrown after all
/// workers have joined.
template <typename Task>
void parallel_for(std::size_t count, int workers, Task&& task) {
  std::vector<std::exception_ptr> errors(count);
  auto body = [&](std::atomic<std::size_t>& next) {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::atomic<std::size_t> next{0};
  const std::size_t threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    body(next);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back([&] { body(next); });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ebm::parareal
