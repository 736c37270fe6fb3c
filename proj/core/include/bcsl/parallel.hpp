#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace bcsl {

// Resolves a thread count: explicit > 0 wins, else BCSL_THREADS, else 1.
int resolve_threads(int requested);

// Runs f(i) for i in [0, n) on up to `threads` workers. Work items write to
// their own slots, so callers reduce afterwards in index order.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  std::size_t t = static_cast<std::size_t>(std::max(1, threads));
  t = std::min(t, n);
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errs(t);
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (std::size_t w = 0; w < t; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
      } catch (...) {
        errs[w] = std::current_exception();
        next.store(n);
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace bcsl
