#include "sst/tracker.hpp"

#include <cmath>

namespace sst::tracker {

std::size_t default_threshold_k(std::size_t n, std::size_t r,
                                std::optional<double> sparsity) {
  if (n < 1) throw DimensionError("default_threshold_k: empty ambient dimension");
  double raw;
  if (sparsity) {
    if (!(*sparsity >= 0.0 && *sparsity < 1.0))
      throw ConfigError("default_threshold_k: sparsity must lie in [0,1)");
    raw = (1.0 - *sparsity) * static_cast<double>(n);
  } else {
    raw = 10.0 * static_cast<double>(r) * std::log(static_cast<double>(n));
  }
  auto k = static_cast<long long>(std::llround(raw));
  if (k < 1) k = 1;
  if (k > static_cast<long long>(n)) k = static_cast<long long>(n);
  return static_cast<std::size_t>(k);
}

}  // namespace sst::tracker
