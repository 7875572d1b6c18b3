#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace relaxosc {

/// Failure of an iterative numerical procedure (integration, bisection,
/// fixed-point search). The message carries the last known state.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed configuration input (bad key, bad number format, missing field).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Number of worker threads to use: RELAXOSC_THREADS when set (clamped to at
/// least 1), hardware concurrency otherwise.
unsigned thread_budget();

/// Deterministic parallel map over [0, n): static block partition, results
/// must be written to disjoint slots by the callee. Rethrows the exception of
/// the lowest failing index after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Shortest decimal form with 17 significant digits; round-trips a double.
std::string fmt17(double v);

}  // namespace relaxosc
