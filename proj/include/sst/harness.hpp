#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sst/doa.hpp"
#include "sst/metrics.hpp"
#include "sst/streams.hpp"
#include "sst/tracker.hpp"

// Experiment front end: config schema, seeded orchestration of streams,
// trackers and metrics, CSV/JSON artifact emission.
namespace sst::harness {

enum class ExperimentKind { subspace_tracking, doa_tracking };
enum class Algorithm { alpha_opit, opit };

const char* experiment_name(ExperimentKind kind);
const char* algorithm_name(Algorithm alg);

// Fully-resolved experiment description. load_config fills every field, so
// the metadata echo has no hidden defaults.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::subspace_tracking;
  std::size_t n = 200;
  std::size_t r = 5;
  long T = 2000;
  double lambda = 0.1;
  double alpha = 0.9;
  double p = 2.0;
  std::size_t k = 40;  // thresholding count, resolved at load time
  double sparsity = 0.8;
  double epsilon = 1e-2;
  streams::NoiseSpec noise;
  std::vector<long> change_points;
  std::vector<std::uint64_t> seeds;
  std::vector<Algorithm> algorithms;
  std::vector<doa::Trajectory> trajectories;  // doa only
  std::string output_dir = "out";

  doa::SteeringConfig steering() const;
  tracker::TrackerParams tracker_params(Algorithm alg) const;
};

// Parses and validates the JSON schema documented in the README; unknown
// keys are errors. parse_config takes the document text directly.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

// Canonical serialization of the resolved config (sorted keys, compact) and
// its FNV-1a fingerprint.
std::string config_to_json(const ExperimentConfig& cfg);
std::string config_digest(const ExperimentConfig& cfg);

// Tracker init seed derived from the stream seed; identical for every
// algorithm within a seed so compared trackers start from the same basis.
std::uint64_t tracker_seed(std::uint64_t stream_seed);

struct DoaTrace {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string stream_digest;
  std::vector<doa::DoaEstimate> records;
  std::vector<long long> step_time_ns;  // aligned with records
  bool clipped = false;
};

struct RunOutput {
  std::vector<metrics::SepTrace> sep_traces;  // subspace experiment
  std::vector<DoaTrace> doa_traces;           // doa experiment
};

// Runs every (seed, algorithm) pair. Streams are regenerated per algorithm
// from the same seed; the digests must agree or the run aborts, enforcing
// the shared-data contract.
RunOutput run_experiment(const ExperimentConfig& cfg);

// One CSV plus one metadata JSON per (algorithm, seed). `stride` thins CSV
// rows (first row always kept); `timing` switches the step_time_ns column
// from the reproducible 0 to measured wall times. Returns written paths.
std::vector<std::string> write_outputs(const RunOutput& results, const ExperimentConfig& cfg,
                                       long stride = 1, bool timing = false);

}  // namespace sst::harness
