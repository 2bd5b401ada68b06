#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace emitsim {

/// Worker threads used by parallel_for. 0 selects the hardware concurrency.
void set_thread_count(int n);
int thread_count();

/// Calls f(i) for i in [begin, end), split into contiguous chunks across
/// threads. Results are independent of the thread count as long as f(i)
/// only writes state owned by index i.
template <typename F>
void parallel_for(Eigen::Index begin, Eigen::Index end, F&& f) {
  const Eigen::Index n = end - begin;
  if (n <= 0) return;
  const int threads =
      static_cast<int>(std::min<Eigen::Index>(thread_count(), n));
  if (threads <= 1 || n < 64) {
    for (Eigen::Index i = begin; i < end; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const Eigen::Index chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const Eigen::Index lo = begin + t * chunk;
    const Eigen::Index hi = std::min(end, lo + chunk);
    pool.emplace_back([&, t, lo, hi] {
      try {
        for (Eigen::Index i = lo; i < hi; ++i) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

} // namespace emitsim
