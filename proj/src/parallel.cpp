#include "lingbase/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lingbase::parallel {

int worker_count() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const char* env = std::getenv("LINGBASE_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1 && cap < n) n = cap;
    } catch (...) {
      // unparseable cap is ignored
    }
  }
  return n < 1 ? 1 : n;
}

}  // namespace lingbase::parallel
