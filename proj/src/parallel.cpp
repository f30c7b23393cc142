#include "sst/parallel.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sst::par {

namespace {
std::atomic<std::size_t> g_min_work{1u << 16};
std::atomic<int> g_max_threads{0};
}  // namespace

std::size_t min_parallel_work() { return g_min_work.load(std::memory_order_relaxed); }

void set_min_parallel_work(std::size_t scalar_ops) {
  g_min_work.store(scalar_ops, std::memory_order_relaxed);
}

int max_threads() {
  int cap = g_max_threads.load(std::memory_order_relaxed);
#ifdef _OPENMP
  int rt = omp_get_max_threads();
  if (cap <= 0) return rt;
  return cap < rt ? cap : rt;
#else
  return cap <= 0 ? 1 : 1;
#endif
}

void set_max_threads(int n) { g_max_threads.store(n, std::memory_order_relaxed); }

bool should_parallelize(std::size_t scalar_ops) {
#ifdef _OPENMP
  return scalar_ops >= min_parallel_work() && max_threads() > 1;
#else
  (void)scalar_ops;
  return false;
#endif
}

}  // namespace sst::par
