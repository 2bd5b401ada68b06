#include "emitsim/parallel.hpp"

#include <atomic>

namespace emitsim {

namespace {
std::atomic<int> requested_threads{1};
}

void set_thread_count(int n) { requested_threads = n < 0 ? 1 : n; }

int thread_count() {
  const int n = requested_threads;
  if (n > 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace emitsim
