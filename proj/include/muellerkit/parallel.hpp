#pragma once

#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace muellerkit {

/// MUELLERKIT_WORKERS when set to a positive integer, otherwise the hardware
/// thread count.
inline std::size_t default_workers() {
  if (const char* env = std::getenv("MUELLERKIT_WORKERS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Splits [0, n) into `workers` contiguous chunks and calls body(begin, end)
/// on each. Callers write only to slots they own, so the result does not
/// depend on the worker count. The first exception (by chunk index) is
/// rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t n, std::size_t workers, Body&& body) {
  if (n == 0) return;
  if (workers <= 1 || n < 2) {
    body(std::size_t{0}, n);
    return;
  }
  if (workers > n) workers = n;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = n * w / workers;
      const std::size_t end = n * (w + 1) / workers;
      pool.emplace_back([&, begin, end, w] {
        try {
          body(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace muellerkit
