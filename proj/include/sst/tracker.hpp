#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "sst/linalg.hpp"
#include "sst/matrix.hpp"
#include "sst/rng.hpp"

// Streaming subspace trackers: the thresholded online power iteration
// baseline and its robust variant that downweights each sample by a
// divergence-motivated function of its projection residual. One template
// serves the real and complex fields.
namespace sst::tracker {

struct TrackerParams {
  std::size_t rank = 1;     // r
  double lambda = 0.1;      // forgetting weight, (0, 1]
  double alpha = 0.9;       // divergence parameter, (0, 1) when robust
  double p = 2.0;           // residual exponent, (0, 2]
  std::size_t keep = 1;     // thresholding factor k, entries kept per column
  bool robust = true;       // false: plain recursion, weight == 1

  void validate(std::size_t n) const {
    if (rank < 1 || rank >= n) throw DimensionError("tracker: need n > r >= 1");
    if (keep < 1 || keep > n) throw DimensionError("tracker: k out of [1, n]");
    if (!(lambda > 0.0 && lambda <= 1.0))
      throw ConfigError("tracker: lambda must lie in (0,1]");
    if (robust && !(alpha > 0.0 && alpha < 1.0))
      throw ConfigError("tracker: alpha must lie in (0,1)");
    if (!(p > 0.0 && p <= 2.0)) throw ConfigError("tracker: p must lie in (0,2]");
  }
};

// Live tracker state. The persistent numeric payload is exactly the basis,
// the sketch and the rotation: 2nr + r^2 scalars.
template <typename T>
struct TrackerState {
  Matrix<T> basis;     // U_t, orthonormal columns
  Matrix<T> sketch;    // S_t (pre-threshold form carried between steps)
  Matrix<T> rotation;  // E_t = U_{t-1}^H U_t
  long step_count = 0;
  double last_weight = 1.0;
  double last_residual = 0.0;
  bool last_rank_deficient = false;

  std::size_t dim() const { return basis.rows(); }
  std::size_t rank() const { return basis.cols(); }

  // Scalar count of the persistent matrices, for the memory contract.
  std::size_t payload_scalars() const {
    return basis.size() + sketch.size() + rotation.size();
  }
};

// Keeps the k largest-magnitude entries of each column, zeroing the rest.
// Ties in magnitude break toward the lower row index so seeded runs are
// reproducible.
template <typename T>
Matrix<T> threshold_columns(const Matrix<T>& s, std::size_t k) {
  const std::size_t n = s.rows(), r = s.cols();
  if (k < 1 || k > n) throw DimensionError("threshold_columns: k out of [1, n]");
  if (k == n) return s;

  Matrix<T> out(n, r);
  std::vector<std::size_t> idx(n);
  std::vector<double> mag(n);
  for (std::size_t j = 0; j < r; ++j) {
    for (std::size_t i = 0; i < n; ++i) mag[i] = field::abs_sq(s(i, j));
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1), idx.end(),
                     [&](std::size_t a, std::size_t b) {
                       if (mag[a] != mag[b]) return mag[a] > mag[b];
                       return a < b;
                     });
    for (std::size_t m = 0; m < k; ++m) out(idx[m], j) = s(idx[m], j);
  }
  return out;
}

// Sample weight exp(-((1-alpha)/2) * residual^p). Decreasing in the
// residual, equal to 1 at zero residual, and underflowing to 0 for huge
// residuals so corrupted samples degrade to a pure decay step.
inline double alpha_weight(double residual_norm, double alpha, double p) {
  return std::exp(-0.5 * (1.0 - alpha) * std::pow(residual_norm, p));
}

// Thresholding factor: round((1-sparsity) n) when the sparsity level is
// known, otherwise round(10 r ln n), both clamped to [1, n].
std::size_t default_threshold_k(std::size_t n, std::size_t r,
                                std::optional<double> sparsity);

template <typename T>
TrackerState<T> init_tracker(std::size_t n, const TrackerParams& params,
                             std::uint64_t seed) {
  params.validate(n);
  Rng rng(seed);
  Matrix<T> g(n, params.rank);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if constexpr (field::is_complex<T>::value)
      g.data()[i] = T{rng.normal(), rng.normal()};
    else
      g.data()[i] = rng.normal();
  }
  TrackerState<T> st;
  st.basis = linalg::qr_orthonormalize(g).first;
  st.sketch = Matrix<T>(n, params.rank);
  st.rotation = Matrix<T>::identity(params.rank);
  return st;
}

// One streaming update. Projects the sample, weights it by the residual
// when robust, folds it into the decayed sketch, thresholds per column and
// re-orthonormalizes. O(n r^2) arithmetic per call.
template <typename T>
void tracker_step(TrackerState<T>& st, std::span<const T> x, const TrackerParams& params) {
  const std::size_t n = st.dim();
  params.validate(n);
  if (x.size() != n) throw DimensionError("tracker_step: sample length disagrees");
  if (!linalg::all_finite(x)) throw NonFiniteError("tracker_step: non-finite sample entry");

  std::vector<T> coeffs = linalg::conj_transpose_matvec(st.basis, x);
  std::vector<T> residual = linalg::matvec(st.basis, std::span<const T>(coeffs));
  for (std::size_t i = 0; i < n; ++i) residual[i] = x[i] - residual[i];
  const double residual_norm = linalg::vector_norm(std::span<const T>(residual));

  const double weight =
      params.robust ? alpha_weight(residual_norm, params.alpha, params.p) : 1.0;

  // S_t = (1-lambda) S_{t-1} E_{t-1} + lambda w_t x z^H
  Matrix<T> sketch = linalg::matmul(st.sketch, st.rotation);
  const double decay = 1.0 - params.lambda;
  for (std::size_t i = 0; i < sketch.size(); ++i) sketch.data()[i] = sketch.data()[i] * T{decay};
  linalg::add_scaled_outer(sketch, params.lambda * weight, x, std::span<const T>(coeffs));

  Matrix<T> clipped = threshold_columns(sketch, params.keep);
  auto [basis, rank_deficient] = linalg::qr_orthonormalize(clipped);
  st.rotation = linalg::conj_transpose_matmul(st.basis, basis);
  st.basis = std::move(basis);
  st.sketch = std::move(sketch);
  st.step_count += 1;
  st.last_weight = weight;
  st.last_residual = residual_norm;
  st.last_rank_deficient = rank_deficient;
}

// Batch power iteration on a fixed covariance, from a seeded random
// orthonormal start. The streaming tracker is checked against this on
// stationary data.
template <typename T>
Matrix<T> batch_power_iteration(const Matrix<T>& c, std::size_t r, std::size_t iters,
                                std::uint64_t seed = 0) {
  if (c.rows() != c.cols()) throw DimensionError("batch_power_iteration: square input required");
  if (r < 1 || r > c.rows()) throw DimensionError("batch_power_iteration: rank out of range");
  Rng rng(seed);
  Matrix<T> u(c.rows(), r);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if constexpr (field::is_complex<T>::value)
      u.data()[i] = T{rng.normal(), rng.normal()};
    else
      u.data()[i] = rng.normal();
  }
  u = linalg::qr_orthonormalize(u).first;
  for (std::size_t l = 0; l < iters; ++l) {
    Matrix<T> s = linalg::matmul(c, u);
    u = linalg::qr_orthonormalize(s).first;
  }
  return u;
}

}  // namespace sst::tracker
