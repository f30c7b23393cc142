#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sst/errors.hpp"
#include "sst/matrix.hpp"
#include "sst/rng.hpp"

// Seeded generators for the synthetic experiments: a sparse slowly-rotating
// ground-truth subspace, low-rank samples with heavy-tailed corruption, and
// scheduled abrupt subspace replacements.
namespace sst::streams {

enum class NoiseKind { gaussian_only, laplace_mix, cauchy_mix, laplace_cauchy_mix };

const char* noise_kind_name(NoiseKind kind);
NoiseKind noise_kind_from_name(const std::string& name);

// Per-entry noise law: with probability (1-delta) a N(0, sigma_n^2) draw,
// otherwise a heavy-tailed draw with location mu and scale gamma.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::gaussian_only;
  double delta = 0.0;    // corruption proportion, [0, 1)
  double mu = 0.0;       // heavy-tail location
  double gamma = 1.0;    // heavy-tail scale, > 0
  double sigma_n = 0.1;  // Gaussian std, > 0

  void validate() const {
    if (!(delta >= 0.0 && delta < 1.0))
      throw ConfigError("noise: delta must lie in [0,1)");
    if (!(gamma > 0.0)) throw ConfigError("noise: gamma must be positive");
    if (!(sigma_n > 0.0)) throw ConfigError("noise: sigma_n must be positive");
    if (kind == NoiseKind::gaussian_only && delta != 0.0)
      throw ConfigError("noise: gaussian_only requires delta = 0");
  }
};

// One observation with its ground truth: x = ell + nu, ell = A_true w.
struct Sample {
  long t = 0;
  std::vector<double> x;
  std::vector<double> w;
  std::vector<double> ell;
  std::vector<double> nu;
  RealMatrix A_true;
};

// Draws n i.i.d. entries of the mixture. Per entry, when delta > 0 one
// uniform selects the branch, then the branch consumes its own draws; the
// order is part of the determinism contract.
std::vector<double> sample_noise(const NoiseSpec& spec, std::size_t n, Rng& rng);

// Sparse subspace init: each column's support is a uniform size-m subset,
// m = round((1-sparsity) n), values standard normal under the mask. Columns
// are redrawn (whole matrix) in the improbable case they come out linearly
// dependent.
std::pair<RealMatrix, RealMatrix> init_sparse_subspace(std::size_t n, std::size_t r,
                                                       double sparsity, Rng& rng);
std::pair<RealMatrix, RealMatrix> init_sparse_subspace(std::size_t n, std::size_t r,
                                                       double sparsity,
                                                       std::uint64_t seed);

// Single-owner stream state machine. One embedded RNG drives everything, so
// (constructor arguments, seed) fully determine the sample sequence.
class StreamProcess {
 public:
  StreamProcess(std::size_t n, std::size_t r, double sparsity, double epsilon,
                NoiseSpec noise, std::vector<long> change_points, std::uint64_t seed);

  // A_t = mask .* (A_{t-1} + epsilon V_t) with V_t a fresh full normal
  // draw; at a scheduled change point the subspace and mask are redrawn
  // outright. Increments t.
  void evolve();

  // Evolves, then emits x_t = A_t w_t + nu_t with all ground truth attached.
  Sample next();

  long t() const { return t_; }
  std::size_t dim() const { return n_; }
  std::size_t rank() const { return r_; }
  const RealMatrix& subspace() const { return a_; }
  const RealMatrix& mask() const { return omega_; }
  const NoiseSpec& noise() const { return noise_; }
  double epsilon() const { return epsilon_; }
  double sparsity() const { return sparsity_; }

 private:
  std::size_t n_, r_;
  double sparsity_, epsilon_;
  NoiseSpec noise_;
  std::vector<long> change_points_;
  Rng rng_;
  RealMatrix a_, omega_;
  long t_ = 0;
};

inline void evolve_subspace(StreamProcess& proc) { proc.evolve(); }
inline Sample next_sample(StreamProcess& proc) { return proc.next(); }

}  // namespace sst::streams
