#pragma once

#include <cstddef>

// Runtime knobs for the OpenMP kernel paths. Kernels fall back to their
// serial loops below the work threshold, so small tracker-sized problems
// never pay fork/join overhead. All parallel loops partition output
// elements (never reductions), which keeps results bit-identical to the
// serial path at any thread count.
namespace sst::par {

std::size_t min_parallel_work();
void set_min_parallel_work(std::size_t scalar_ops);

// 0 means "whatever the OpenMP runtime says".
int max_threads();
void set_max_threads(int n);

bool should_parallelize(std::size_t scalar_ops);

}  // namespace sst::par
