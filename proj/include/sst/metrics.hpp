#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sst/linalg.hpp"
#include "sst/matrix.hpp"

// Subspace estimation performance (SEP) and per-run trace bookkeeping.
namespace sst::metrics {

// Ratio of the estimate's energy outside the true subspace to the energy
// inside it; 0 at perfect alignment, +inf (the divergent marker) when the
// estimate is numerically orthogonal to the truth.
inline constexpr double kDivergent = std::numeric_limits<double>::infinity();

template <typename T>
double sep(const Matrix<T>& u_true, const Matrix<T>& u_est) {
  if (!u_true.same_shape(u_est))
    throw DimensionError("sep: basis shapes disagree");
  const Matrix<T> m = linalg::conj_transpose_matmul(u_true, u_est);
  const double inside = linalg::frobenius_norm_sq(m);
  const double total = linalg::frobenius_norm_sq(u_est);
  if (inside < 1e-14 * static_cast<double>(u_est.cols())) return kDivergent;
  return (total - inside) / inside;
}

struct TraceRecord {
  long t = 0;
  double sep = 0.0;
  double weight = 1.0;
  long long step_time_ns = 0;
};

struct SepTrace {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string stream_digest;
  std::vector<TraceRecord> records;
};

// Window statistics over records with t > burn_in. Divergent SEP values are
// excluded from the order statistics and means, and counted separately; if
// the window holds no finite SEP at all the SEP statistics are +inf.
struct TraceSummary {
  double median_sep = 0.0;
  double mean_sep = 0.0;
  double last_decile_mean_sep = 0.0;
  double median_step_time_ns = 0.0;
  std::size_t divergent_count = 0;
  std::size_t window_size = 0;
};

TraceSummary summarize_trace(const SepTrace& trace, long burn_in);

// Median of an unordered sample (average of the middle pair when even).
double median(std::vector<double> values);

}  // namespace sst::metrics
