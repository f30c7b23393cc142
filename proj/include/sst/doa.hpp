#pragma once

#include <string>
#include <vector>

#include "sst/matrix.hpp"
#include "sst/rng.hpp"
#include "sst/streams.hpp"

// Direction-of-arrival experiment pieces: moving-source trajectories, the
// uniform-linear-array steering model, LS-ESPRIT angle extraction, and
// track association.
namespace sst::doa {

// Source angle paths in degrees. Parameter meaning depends on the kind:
//   linear: a = start, b = slope per step
//   sawtooth: a = min, b = max, ramp over `period` steps then wrap
//   sinusoid: a = center, b = amplitude, full cycle over `period` steps
struct Trajectory {
  enum class Kind { linear, sawtooth, sinusoid };
  Kind kind = Kind::linear;
  double a = 0.0;
  double b = 0.0;
  double period = 1.0;

  double angle_at(long t) const;
  void validate() const;
};

const char* trajectory_kind_name(Trajectory::Kind kind);
Trajectory::Kind trajectory_kind_from_name(const std::string& name);

struct SteeringConfig {
  std::size_t n = 20;                    // sensors
  std::vector<Trajectory> trajectories;  // one per source, K = size
  streams::NoiseSpec noise;              // applied per real/imag component

  std::size_t sources() const { return trajectories.size(); }
  // Checks structural constraints plus the arcsin domain over t = 1..horizon.
  void validate(long horizon) const;
};

// Column k = [1, e^{jw}, ..., e^{j(n-1)w}]^T, w = pi sin(theta).
ComplexMatrix steering_matrix(const std::vector<double>& angles_deg, std::size_t n);

std::vector<double> true_angles(const SteeringConfig& cfg, long t);

// x_t = A(theta_t) s_t + nu_t with s_t ~ CN(0, I_K) and nu_t's real and
// imaginary parts drawn independently from the configured mixture.
std::vector<Complex> generate_doa_sample(const SteeringConfig& cfg, long t, Rng& rng);

struct EspritAngles {
  std::vector<double> degrees;  // unordered; associate via match_tracks
  bool clipped = false;         // an eigenvalue phase hit the arcsin boundary
};

// LS-ESPRIT on the single-lag subarray pair (rows 0..n-2 vs 1..n-1).
EspritAngles esprit_angles(const ComplexMatrix& u);

// Assigns each current angle to a previous track label (vector position).
// Exhaustive optimal assignment for K <= 8, greedy nearest-pair beyond.
std::vector<double> match_tracks(const std::vector<double>& previous,
                                 const std::vector<double>& current);

struct DoaEstimate {
  long t = 0;
  std::vector<double> angles;  // labeled: index k follows source k
  std::vector<double> truth;
};

}  // namespace sst::doa
