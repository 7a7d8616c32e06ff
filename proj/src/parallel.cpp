#include "rdpp/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rdpp::par {

int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void for_index(std::int64_t n, int threads, void (*f)(std::int64_t, void*),
               void* ctx) {
  if (threads == 0) threads = hardware_threads();
  if (threads <= 1 || n < 2) {
    for (std::int64_t i = 0; i < n; ++i) f(i, ctx);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) f(i, ctx);
#else
  for (std::int64_t i = 0; i < n; ++i) f(i, ctx);
#endif
}

}  // namespace rdpp::par
