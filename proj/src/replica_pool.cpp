#include "nbcpp/replica_pool.hpp"
#include <algorithm>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nbcpp::pool {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NBCPP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void run_indexed(std::int64_t n, int threads,
                 const std::function<void(std::int64_t, int)>& fn) {
  threads = std::max<int>(
      1, static_cast<int>(std::min<std::int64_t>(threads, n)));
  if (threads == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i, 0);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> ws;
  ws.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    ws.emplace_back([&, w] {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= n) break;
        try {
          fn(i, w);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& t : ws) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace nbcpp::pool
