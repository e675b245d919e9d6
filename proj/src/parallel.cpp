#include "holdercone/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace holdercone {

namespace {
thread_local bool t_inside_worker = false;
}  // namespace

unsigned worker_count() {
  if (const char* env = std::getenv("HOLDERCONE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_blocks(std::size_t n, std::size_t blocks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  blocks = std::clamp<std::size_t>(blocks, 1, n);
  auto range = [&](std::size_t b) {
    return std::pair{n * b / blocks, n * (b + 1) / blocks};
  };
  const std::size_t workers = std::min<std::size_t>(worker_count(), blocks);
  if (workers <= 1 || t_inside_worker) {
    for (std::size_t b = 0; b < blocks; ++b) {
      const auto [lo, hi] = range(b);
      body(b, lo, hi);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      t_inside_worker = true;
      for (std::size_t b = next++; b < blocks; b = next++) {
        try {
          const auto [lo, hi] = range(b);
          body(b, lo, hi);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace holdercone
