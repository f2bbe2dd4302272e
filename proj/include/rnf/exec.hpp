#pragma once

// Execution policy for the compute kernels. Parallel variants use OpenMP
// with each output cell written by exactly one thread, so results are
// bit-identical to the serial reference for any thread count.

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rnf {

enum class Exec { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace rnf
