#pragma once

// Replicate maps. `kernel(i)` must be a pure function of the replicate index;
// results land in slot i, so both maps return identical vectors for any
// thread count.

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace optreg {

template <typename Result, typename Kernel>
std::vector<Result> map_replicates_serial(std::size_t n, Kernel&& kernel) {
  std::vector<Result> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = kernel(i);
  return out;
}

/// threads <= 0 uses the OpenMP default team size.
template <typename Result, typename Kernel>
std::vector<Result> map_replicates_parallel(std::size_t n, int threads,
                                            Kernel&& kernel) {
  std::vector<Result> out(n);
  std::exception_ptr error;
  const auto count = static_cast<std::ptrdiff_t>(n);
#ifdef _OPENMP
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
#endif
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = kernel(static_cast<std::size_t>(i));
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(optreg_replicate_error)
#endif
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace optreg
