#include "sst/doa.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "sst/linalg.hpp"

namespace sst::doa {

double Trajectory::angle_at(long t) const {
  const auto tt = static_cast<double>(t);
  switch (kind) {
    case Kind::linear:
      return a + b * tt;
    case Kind::sawtooth: {
      double phase = std::fmod(tt, period);
      if (phase < 0.0) phase += period;
      return a + (b - a) * (phase / period);
    }
    case Kind::sinusoid:
      return a + b * std::sin(2.0 * std::numbers::pi * tt / period);
  }
  throw ConfigError("trajectory: unknown kind tag");
}

void Trajectory::validate() const {
  if (kind != Kind::linear && !(period > 0.0))
    throw ConfigError("trajectory: period must be positive");
  if (kind == Kind::sawtooth && !(a < b))
    throw ConfigError("trajectory: sawtooth needs min < max");
}

const char* trajectory_kind_name(Trajectory::Kind kind) {
  switch (kind) {
    case Trajectory::Kind::linear: return "linear";
    case Trajectory::Kind::sawtooth: return "sawtooth";
    case Trajectory::Kind::sinusoid: return "sinusoid";
  }
  throw ConfigError("trajectory: unknown kind tag");
}

Trajectory::Kind trajectory_kind_from_name(const std::string& name) {
  if (name == "linear") return Trajectory::Kind::linear;
  if (name == "sawtooth") return Trajectory::Kind::sawtooth;
  if (name == "sinusoid") return Trajectory::Kind::sinusoid;
  throw ConfigError("trajectory: unknown kind '" + name + "'");
}

void SteeringConfig::validate(long horizon) const {
  if (trajectories.empty()) throw ConfigError("steering: no sources configured");
  if (sources() > n - 1)
    throw ConfigError("steering: need source count <= n - 1");
  noise.validate();
  for (const auto& traj : trajectories) traj.validate();
  for (long t = 1; t <= horizon; ++t)
    for (const auto& traj : trajectories)
      if (!(std::abs(traj.angle_at(t)) < 90.0))
        throw ConfigError("steering: trajectory leaves (-90,90) degrees within horizon");
}

ComplexMatrix steering_matrix(const std::vector<double>& angles_deg, std::size_t n) {
  if (angles_deg.empty() || n < 1)
    throw DimensionError("steering_matrix: empty angles or array");
  ComplexMatrix a(n, angles_deg.size());
  for (std::size_t k = 0; k < angles_deg.size(); ++k) {
    const double theta = angles_deg[k];
    if (!(std::abs(theta) < 90.0))
      throw std::domain_error("steering_matrix: angle outside (-90,90) degrees");
    const double omega = std::numbers::pi * std::sin(theta * std::numbers::pi / 180.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double phase = omega * static_cast<double>(i);
      a(i, k) = Complex{std::cos(phase), std::sin(phase)};
    }
  }
  return a;
}

std::vector<double> true_angles(const SteeringConfig& cfg, long t) {
  std::vector<double> out(cfg.sources());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = cfg.trajectories[k].angle_at(t);
  return out;
}

std::vector<Complex> generate_doa_sample(const SteeringConfig& cfg, long t, Rng& rng) {
  const std::size_t n = cfg.n, k = cfg.sources();
  const ComplexMatrix a = steering_matrix(true_angles(cfg, t), n);
  std::vector<Complex> s(k);
  for (auto& v : s) v = rng.complex_normal();
  std::vector<Complex> x = linalg::matvec(a, std::span<const Complex>(s));
  const std::vector<double> nu_re = streams::sample_noise(cfg.noise, n, rng);
  const std::vector<double> nu_im = streams::sample_noise(cfg.noise, n, rng);
  for (std::size_t i = 0; i < n; ++i) x[i] += Complex{nu_re[i], nu_im[i]};
  return x;
}

EspritAngles esprit_angles(const ComplexMatrix& u) {
  const std::size_t n = u.rows(), r = u.cols();
  if (n < r + 1) throw DimensionError("esprit_angles: need n >= r + 1 rows");
  ComplexMatrix u1(n - 1, r), u2(n - 1, r);
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      u1(i, j) = u(i, j);
      u2(i, j) = u(i + 1, j);
    }
  const ComplexMatrix psi = linalg::least_squares_solve(u1, u2);
  const std::vector<Complex> eigs = linalg::small_eigenvalues(psi);

  EspritAngles out;
  out.degrees.reserve(r);
  for (const Complex& lambda : eigs) {
    const double omega = std::arg(lambda);
    double ratio = omega / std::numbers::pi;
    if (std::abs(ratio) >= 1.0) {
      out.clipped = true;
      ratio = std::clamp(ratio, -1.0, 1.0);
    }
    out.degrees.push_back(std::asin(ratio) * 180.0 / std::numbers::pi);
  }
  return out;
}

namespace {

double assignment_cost(const std::vector<double>& prev, const std::vector<double>& cur,
                       const std::vector<std::size_t>& perm) {
  double cost = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i) cost += std::abs(prev[i] - cur[perm[i]]);
  return cost;
}

}  // namespace

std::vector<double> match_tracks(const std::vector<double>& previous,
                                 const std::vector<double>& current) {
  const std::size_t k = previous.size();
  if (current.size() != k)
    throw DimensionError("match_tracks: track counts disagree");
  std::vector<double> out(k);

  if (k <= 8) {
    std::vector<std::size_t> perm(k), best(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    best = perm;
    double best_cost = assignment_cost(previous, current, perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
      const double cost = assignment_cost(previous, current, perm);
      if (cost < best_cost) {
        best_cost = cost;
        best = perm;
      }
    }
    for (std::size_t i = 0; i < k; ++i) out[i] = current[best[i]];
    return out;
  }

  // Greedy: repeatedly bind the globally closest unmatched pair.
  std::vector<bool> prev_done(k), cur_done(k);
  for (std::size_t round = 0; round < k; ++round) {
    double best_d = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (prev_done[i]) continue;
      for (std::size_t j = 0; j < k; ++j) {
        if (cur_done[j]) continue;
        const double d = std::abs(previous[i] - current[j]);
        if (d < best_d) {
          best_d = d;
          bi = i;
          bj = j;
        }
      }
    }
    prev_done[bi] = cur_done[bj] = true;
    out[bi] = current[bj];
  }
  return out;
}

}  // namespace sst::doa
