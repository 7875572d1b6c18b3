#include "relaxosc/util.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace relaxosc {

unsigned thread_budget() {
  if (const char* env = std::getenv("RELAXOSC_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
    return 1;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  unsigned nt = thread_budget();
  if (nt > n) nt = static_cast<unsigned>(n);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  struct Failure {
    std::size_t index;
    std::exception_ptr err;
  };
  std::vector<Failure> failures(nt, Failure{SIZE_MAX, nullptr});
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (unsigned t = 0; t < nt; ++t) {
    pool.emplace_back([&, t]() {
      std::size_t lo = n * t / nt, hi = n * (t + 1) / nt;
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          fn(i);
        } catch (...) {
          failures[t] = {i, std::current_exception()};
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();

  std::size_t best = SIZE_MAX;
  std::exception_ptr err;
  for (auto& f : failures) {
    if (f.err && f.index < best) {
      best = f.index;
      err = f.err;
    }
  }
  if (err) std::rethrow_exception(err);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace relaxosc
