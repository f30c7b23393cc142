#include "sst/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sst/errors.hpp"

namespace sst::metrics {

double median(std::vector<double> values) {
  if (values.empty()) throw EmptyWindowError("median: no values");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

TraceSummary summarize_trace(const SepTrace& trace, long burn_in) {
  std::vector<const TraceRecord*> window;
  window.reserve(trace.records.size());
  for (const auto& rec : trace.records)
    if (rec.t > burn_in) window.push_back(&rec);
  if (window.empty())
    throw EmptyWindowError("summarize_trace: no records past burn-in");

  TraceSummary out;
  out.window_size = window.size();

  std::vector<double> finite, times;
  finite.reserve(window.size());
  times.reserve(window.size());
  for (const auto* rec : window) {
    times.push_back(static_cast<double>(rec->step_time_ns));
    if (std::isfinite(rec->sep))
      finite.push_back(rec->sep);
    else
      out.divergent_count += 1;
  }
  out.median_step_time_ns = median(times);

  if (finite.empty()) {
    out.median_sep = out.mean_sep = out.last_decile_mean_sep = kDivergent;
    return out;
  }
  out.median_sep = median(finite);
  double sum = 0.0;
  for (double v : finite) sum += v;
  out.mean_sep = sum / static_cast<double>(finite.size());

  // Last decile: the final ceil(W/10) window records by time, finite only.
  const std::size_t tail = (window.size() + 9) / 10;
  double tail_sum = 0.0;
  std::size_t tail_n = 0;
  for (std::size_t i = window.size() - tail; i < window.size(); ++i) {
    if (std::isfinite(window[i]->sep)) {
      tail_sum += window[i]->sep;
      tail_n += 1;
    }
  }
  out.last_decile_mean_sep =
      tail_n == 0 ? kDivergent : tail_sum / static_cast<double>(tail_n);
  return out;
}

}  // namespace sst::metrics
