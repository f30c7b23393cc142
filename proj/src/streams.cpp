#include "sst/streams.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sst/linalg.hpp"

namespace sst::streams {

const char* noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::gaussian_only: return "gaussian_only";
    case NoiseKind::laplace_mix: return "laplace_mix";
    case NoiseKind::cauchy_mix: return "cauchy_mix";
    case NoiseKind::laplace_cauchy_mix: return "laplace_cauchy_mix";
  }
  throw ConfigError("noise: unknown kind tag");
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "gaussian_only") return NoiseKind::gaussian_only;
  if (name == "laplace_mix") return NoiseKind::laplace_mix;
  if (name == "cauchy_mix") return NoiseKind::cauchy_mix;
  if (name == "laplace_cauchy_mix") return NoiseKind::laplace_cauchy_mix;
  throw ConfigError("noise: unknown kind '" + name + "'");
}

std::vector<double> sample_noise(const NoiseSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  std::vector<double> nu(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool heavy = spec.delta > 0.0 && rng.uniform01() < spec.delta;
    if (!heavy) {
      nu[i] = spec.sigma_n * rng.normal();
      continue;
    }
    switch (spec.kind) {
      case NoiseKind::laplace_mix:
        nu[i] = laplace_icdf(rng.uniform01(), spec.mu, spec.gamma);
        break;
      case NoiseKind::cauchy_mix:
        nu[i] = cauchy_icdf(rng.uniform01(), spec.mu, spec.gamma);
        break;
      case NoiseKind::laplace_cauchy_mix:
        if (rng.uniform01() < 0.5)
          nu[i] = laplace_icdf(rng.uniform01(), spec.mu, spec.gamma);
        else
          nu[i] = cauchy_icdf(rng.uniform01(), spec.mu, spec.gamma);
        break;
      case NoiseKind::gaussian_only:
        // validate() rules this out (delta must be 0)
        break;
    }
  }
  return nu;
}

namespace {

// Support per column via partial Fisher-Yates, then a full normal draw
// masked down. The full draw keeps the consumed RNG stream independent of
// the sparsity level's support layout.
std::pair<RealMatrix, RealMatrix> draw_sparse_subspace(std::size_t n, std::size_t r,
                                                       std::size_t per_column, Rng& rng) {
  RealMatrix omega(n, r);
  std::vector<std::size_t> idx(n);
  for (std::size_t j = 0; j < r; ++j) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < per_column; ++i) {
      const std::size_t pick = i + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(idx[i], idx[pick]);
      omega(idx[i], j) = 1.0;
    }
  }
  RealMatrix a(n, r);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < r; ++j) a(i, j) = omega(i, j) * rng.normal();
  return {std::move(a), std::move(omega)};
}

}  // namespace

std::pair<RealMatrix, RealMatrix> init_sparse_subspace(std::size_t n, std::size_t r,
                                                       double sparsity, Rng& rng) {
  if (r < 1 || n <= r) throw DimensionError("init_sparse_subspace: need n > r >= 1");
  if (!(sparsity >= 0.0 && sparsity < 1.0))
    throw ConfigError("init_sparse_subspace: sparsity must lie in [0,1)");
  const auto per_column =
      static_cast<long long>(std::llround((1.0 - sparsity) * static_cast<double>(n)));
  if (per_column < 1)
    throw ConfigError("init_sparse_subspace: sparsity leaves no support per column");

  for (int attempt = 0; attempt < 64; ++attempt) {
    auto drawn = draw_sparse_subspace(n, r, static_cast<std::size_t>(per_column), rng);
    if (!linalg::qr_orthonormalize(drawn.first).second) return drawn;
  }
  throw RankError("init_sparse_subspace: masked columns stayed dependent after 64 draws");
}

std::pair<RealMatrix, RealMatrix> init_sparse_subspace(std::size_t n, std::size_t r,
                                                       double sparsity, std::uint64_t seed) {
  Rng rng(seed);
  return init_sparse_subspace(n, r, sparsity, rng);
}

StreamProcess::StreamProcess(std::size_t n, std::size_t r, double sparsity, double epsilon,
                             NoiseSpec noise, std::vector<long> change_points,
                             std::uint64_t seed)
    : n_(n),
      r_(r),
      sparsity_(sparsity),
      epsilon_(epsilon),
      noise_(noise),
      change_points_(std::move(change_points)),
      rng_(seed) {
  if (!(epsilon_ >= 0.0)) throw ConfigError("stream: epsilon must be nonnegative");
  noise_.validate();
  std::sort(change_points_.begin(), change_points_.end());
  change_points_.erase(std::unique(change_points_.begin(), change_points_.end()),
                       change_points_.end());
  auto init = init_sparse_subspace(n_, r_, sparsity_, rng_);
  a_ = std::move(init.first);
  omega_ = std::move(init.second);
}

void StreamProcess::evolve() {
  t_ += 1;
  if (std::binary_search(change_points_.begin(), change_points_.end(), t_)) {
    auto redraw = init_sparse_subspace(n_, r_, sparsity_, rng_);
    a_ = std::move(redraw.first);
    omega_ = std::move(redraw.second);
    return;
  }
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < r_; ++j) {
      const double v = rng_.normal();
      a_(i, j) = omega_(i, j) * (a_(i, j) + epsilon_ * v);
    }
}

Sample StreamProcess::next() {
  evolve();
  Sample s;
  s.t = t_;
  s.w.resize(r_);
  for (std::size_t j = 0; j < r_; ++j) s.w[j] = rng_.normal();
  s.ell = linalg::matvec(a_, std::span<const double>(s.w));
  s.nu = sample_noise(noise_, n_, rng_);
  s.x.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) s.x[i] = s.ell[i] + s.nu[i];
  s.A_true = a_;
  return s;
}

}  // namespace sst::streams
