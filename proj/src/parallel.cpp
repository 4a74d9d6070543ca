#include "curvi/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace curvi {

namespace {
std::atomic<unsigned> g_thread_count{0};
}

void setThreadCount(unsigned count) { g_thread_count = count; }

unsigned threadCount() {
  const unsigned n = g_thread_count.load();
  if (n != 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallelFor(int begin, int end, const std::function<void(int)>& body) {
  if (end <= begin) return;
  const int count = end - begin;
  const int workers = std::min<int>(static_cast<int>(threadCount()), count);
  if (workers <= 1) {
    for (int i = begin; i < end; ++i) body(i);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int lo = begin + static_cast<int>(static_cast<long long>(count) * w / workers);
    const int hi = begin + static_cast<int>(static_cast<long long>(count) * (w + 1) / workers);
    pool.emplace_back([&, lo, hi] {
      try {
        for (int i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace curvi
