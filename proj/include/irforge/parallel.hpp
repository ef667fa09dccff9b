// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace irforge {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Stops handing out new
/// work after the first failure and rethrows the failure with the lowest
/// index, so error reporting does not depend on scheduling.
template <class Fn>
void parallel_for(size_t n, unsigned jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    while (!failed.load()) {
      const size_t i = next.fetch_add(1);
      if (i >= n)
        return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };
  const unsigned width = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < width; ++t)
      pool.emplace_back(worker);
    for (auto& th : pool)
      th.join();
  }
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

} // namespace irforge
