#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mdcert {

// Runs f(i) for i in [0, n) over contiguous chunks. Results written by index
// do not depend on the thread count.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  const std::size_t t = std::clamp<std::size_t>(threads < 1 ? 1 : threads, 1, std::max<std::size_t>(n, 1));
  if (t == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = n * w / t; i < n * (w + 1) / t; ++i) f(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

template <class F>
std::vector<double> parallel_samples(std::size_t n, int threads, F&& sampler) {
  std::vector<double> out(n);
  parallel_for(n, threads, [&](std::size_t i) { out[i] = sampler(i); });
  return out;
}

}  // namespace mdcert
