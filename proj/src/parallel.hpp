#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include "sfem/system.hpp"

namespace sfem::detail {

// Runs body(i) for i in [0, n), concurrently when asked. Callers write
// results into per-index slots and reduce serially, so outputs do not depend
// on the thread count. The first exception thrown is rethrown here.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace sfem::detail
