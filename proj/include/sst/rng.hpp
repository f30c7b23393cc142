#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace sst {

// Inverse-CDF samplers for the heavy-tailed corruption laws. Kept as pure
// functions of the uniform variate so quantiles can be checked analytically.
inline double laplace_icdf(double u, double mu, double gamma) {
  double d = u - 0.5;
  double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  return mu - gamma * s * std::log(1.0 - 2.0 * std::abs(d));
}

inline double cauchy_icdf(double u, double mu, double gamma) {
  return mu + gamma * std::tan(std::numbers::pi * (u - 0.5));
}

// Deterministic random source. All variates are derived from mt19937_64
// output through fixed arithmetic, so a (seed, draw-order) pair pins the
// whole stream independent of standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Index uniform on [0, bound). Modulo bias is below 2^-50 for the sizes
  // used here.
  std::uint64_t below(std::uint64_t bound) { return gen_() % bound; }

  // Standard normal via Box-Muller. No spare is cached: each draw consumes
  // exactly two uniforms.
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Complex normal with E{|z|^2} = 1.
  std::complex<double> complex_normal() {
    double re = normal();
    double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }

 private:
  std::mt19937_64 gen_;
};

// Decorrelates derived generators (tracker init vs. stream draws) that are
// seeded from the same user-facing seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace sst
