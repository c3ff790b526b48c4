#pragma once

#include <cstddef>
#include <exception>

#include <omp.h>

namespace relik::detail {

/// Runs fn(i) for i in [0, n) on an OpenMP team. Work items must write only
/// to their own slot. The first exception thrown by any item is rethrown
/// after the loop, since exceptions may not cross an OpenMP region.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const int team = threads > 0 ? threads : omp_get_max_threads();
  const auto count = static_cast<std::ptrdiff_t>(n);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(relik_parallel_for_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace relik::detail
