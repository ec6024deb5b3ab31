#pragma once

#include <algorithm>
#include <complex>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace indef_theta {

inline constexpr const char *kWorkersEnv = "INDEF_THETA_WORKERS";

/// Worker count: INDEF_THETA_WORKERS if set and positive, else the hardware count.
inline unsigned worker_count() {
  if (const char *s = std::getenv(kWorkersEnv)) {
    try {
      int v = std::stoi(s);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads in contiguous blocks.
/// The first exception thrown by any block is rethrown.
template <class Fn> void parallel_for(std::size_t n, unsigned workers, Fn fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n / 256, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  std::size_t block = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w * block; i < std::min(n, (w + 1) * block); ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto &t : pool) t.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

/// Pairwise sum in index order; the result does not depend on how the terms were computed.
template <class T> T pairwise_sum(const std::vector<T> &v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    T s{};
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

template <class T> T pairwise_sum(const std::vector<T> &v) { return pairwise_sum(v, 0, v.size()); }

} // namespace indef_theta
