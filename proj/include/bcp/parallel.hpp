#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bcp::par {

// Execution policy for kernels that come in a serial reference form and an
// OpenMP form. Both forms produce bit-identical results.
enum class Exec { Serial, Parallel };

inline int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline bool openmp_enabled()
{
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

}  // namespace bcp::par
