#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace eqlearn {

/// Runs fn(task, worker) for task in [0, tasks) on up to `workers` threads,
/// pulling tasks from a shared counter. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t tasks, int workers, Fn&& fn) {
  const std::size_t pool = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), std::max<std::size_t>(tasks, 1));
  if (pool <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) fn(t, std::size_t{0});
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> threads;
    threads.reserve(pool);
    for (std::size_t w = 0; w < pool; ++w) {
      threads.emplace_back([&, w] {
        try {
          for (std::size_t t = next++; t < tasks; t = next++) fn(t, w);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = tasks;
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace eqlearn
