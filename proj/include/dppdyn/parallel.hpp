#ifndef DPPDYN_PARALLEL_HPP
#define DPPDYN_PARALLEL_HPP

#include <atomic>
#include <cstdint>
#include <exception>

#include <omp.h>

#include "dppdyn/common.hpp"

namespace dppdyn {

/// Runs body(i) for i in [0, count). Bodies must only write to per-index
/// storage, so the serial and OpenMP paths produce identical results.
/// The first exception thrown by any body is rethrown on the caller.
template <class Body>
void for_each_index(std::int64_t count, Exec exec, Body&& body) {
  if (exec == Exec::Serial || count < 2) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < count; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      body(i);
    } catch (...) {
#pragma omp critical(dppdyn_for_each_failure)
      {
        if (!failure) failure = std::current_exception();
      }
      failed.store(true, std::memory_order_relaxed);
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace dppdyn

#endif  // DPPDYN_PARALLEL_HPP
