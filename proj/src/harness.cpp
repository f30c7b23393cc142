#include "sst/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sst/digest.hpp"
#include "sst/linalg.hpp"
#include "sst/version.hpp"

namespace sst::harness {

using nlohmann::json;

const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::subspace_tracking: return "subspace_tracking";
    case ExperimentKind::doa_tracking: return "doa_tracking";
  }
  throw ConfigError("config: unknown experiment tag");
}

const char* algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::alpha_opit: return "alpha_opit";
    case Algorithm::opit: return "opit";
  }
  throw ConfigError("config: unknown algorithm tag");
}

doa::SteeringConfig ExperimentConfig::steering() const {
  doa::SteeringConfig cfg;
  cfg.n = n;
  cfg.trajectories = trajectories;
  cfg.noise = noise;
  return cfg;
}

tracker::TrackerParams ExperimentConfig::tracker_params(Algorithm alg) const {
  tracker::TrackerParams params;
  params.rank = r;
  params.lambda = lambda;
  params.alpha = alpha;
  params.p = p;
  params.keep = k;
  params.robust = alg == Algorithm::alpha_opit;
  return params;
}

std::uint64_t tracker_seed(std::uint64_t stream_seed) {
  // Any fixed salt works; it only has to differ from the stream's own use
  // of the seed so tracker init draws are not correlated with sample draws.
  return mix_seed(stream_seed, 0x7261636b6572ull);
}

namespace {

long checked_count(const json& v, const char* key, long lo, long hi) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw ConfigError(std::string("config: '") + key + "' must be an integer");
  const auto raw = v.get<long long>();
  if (raw < lo || raw > hi)
    throw ConfigError(std::string("config: '") + key + "' out of range");
  return static_cast<long>(raw);
}

double checked_real(const json& v, const char* key) {
  if (!v.is_number())
    throw ConfigError(std::string("config: '") + key + "' must be a number");
  return v.get<double>();
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const char* where) {
  for (const auto& item : obj.items())
    if (!allowed.contains(item.key()))
      throw ConfigError(std::string("config: unknown key '") + item.key() + "' in " + where);
}

streams::NoiseSpec parse_noise(const json& obj) {
  reject_unknown_keys(obj, {"kind", "delta", "mu", "gamma", "sigma_n"}, "noise");
  streams::NoiseSpec spec;
  spec.kind = streams::NoiseKind::cauchy_mix;
  spec.delta = 0.1;
  spec.mu = 0.0;
  spec.gamma = 1.0;
  spec.sigma_n = 0.1;
  if (obj.contains("kind")) {
    if (!obj["kind"].is_string()) throw ConfigError("config: noise 'kind' must be a string");
    spec.kind = streams::noise_kind_from_name(obj["kind"].get<std::string>());
    // gaussian_only carries no heavy branch; flip the proportion default off
    if (spec.kind == streams::NoiseKind::gaussian_only) spec.delta = 0.0;
  }
  if (obj.contains("delta")) spec.delta = checked_real(obj["delta"], "delta");
  if (obj.contains("mu")) spec.mu = checked_real(obj["mu"], "mu");
  if (obj.contains("gamma")) spec.gamma = checked_real(obj["gamma"], "gamma");
  if (obj.contains("sigma_n")) spec.sigma_n = checked_real(obj["sigma_n"], "sigma_n");
  spec.validate();
  return spec;
}

doa::Trajectory parse_trajectory(const json& obj) {
  if (!obj.is_object() || !obj.contains("kind") || !obj["kind"].is_string())
    throw ConfigError("config: each trajectory needs a string 'kind'");
  doa::Trajectory traj;
  traj.kind = doa::trajectory_kind_from_name(obj["kind"].get<std::string>());
  switch (traj.kind) {
    case doa::Trajectory::Kind::linear:
      reject_unknown_keys(obj, {"kind", "start", "slope"}, "trajectory");
      traj.a = obj.contains("start") ? checked_real(obj["start"], "start") : -40.0;
      traj.b = obj.contains("slope") ? checked_real(obj["slope"], "slope") : 0.05;
      break;
    case doa::Trajectory::Kind::sawtooth:
      reject_unknown_keys(obj, {"kind", "min", "max", "period"}, "trajectory");
      traj.a = obj.contains("min") ? checked_real(obj["min"], "min") : -10.0;
      traj.b = obj.contains("max") ? checked_real(obj["max"], "max") : 10.0;
      traj.period = obj.contains("period") ? checked_real(obj["period"], "period") : 400.0;
      break;
    case doa::Trajectory::Kind::sinusoid:
      reject_unknown_keys(obj, {"kind", "center", "amplitude", "period"}, "trajectory");
      traj.a = obj.contains("center") ? checked_real(obj["center"], "center") : 30.0;
      traj.b = obj.contains("amplitude") ? checked_real(obj["amplitude"], "amplitude") : 10.0;
      traj.period = obj.contains("period") ? checked_real(obj["period"], "period") : 1000.0;
      break;
  }
  traj.validate();
  return traj;
}

std::vector<doa::Trajectory> default_trajectories() {
  doa::Trajectory linear{doa::Trajectory::Kind::linear, -40.0, 0.05, 1.0};
  doa::Trajectory sawtooth{doa::Trajectory::Kind::sawtooth, -10.0, 10.0, 400.0};
  doa::Trajectory sinusoid{doa::Trajectory::Kind::sinusoid, 30.0, 10.0, 1000.0};
  return {linear, sawtooth, sinusoid};
}

json trajectory_to_json(const doa::Trajectory& traj) {
  json obj;
  obj["kind"] = doa::trajectory_kind_name(traj.kind);
  switch (traj.kind) {
    case doa::Trajectory::Kind::linear:
      obj["start"] = traj.a;
      obj["slope"] = traj.b;
      break;
    case doa::Trajectory::Kind::sawtooth:
      obj["min"] = traj.a;
      obj["max"] = traj.b;
      obj["period"] = traj.period;
      break;
    case doa::Trajectory::Kind::sinusoid:
      obj["center"] = traj.a;
      obj["amplitude"] = traj.b;
      obj["period"] = traj.period;
      break;
  }
  return obj;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.r < 1 || cfg.n <= cfg.r) throw ConfigError("config: need n > r >= 1");
  if (cfg.T < 1) throw ConfigError("config: T must be positive");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  if (!(cfg.lambda > 0.0 && cfg.lambda <= 1.0))
    throw ConfigError("config: lambda must lie in (0,1]");
  if (!(cfg.p > 0.0 && cfg.p <= 2.0)) throw ConfigError("config: p must lie in (0,2]");
  if (cfg.k < 1 || cfg.k > cfg.n) throw ConfigError("config: k must lie in [1, n]");
  if (cfg.seeds.empty()) throw ConfigError("config: seeds must be nonempty");
  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size())
    throw ConfigError("config: seeds must be distinct");
  if (cfg.algorithms.empty()) throw ConfigError("config: algorithms must be nonempty");
  cfg.noise.validate();
  if (cfg.experiment == ExperimentKind::subspace_tracking) {
    if (!(cfg.sparsity >= 0.0 && cfg.sparsity < 1.0))
      throw ConfigError("config: sparsity must lie in [0,1)");
    if (!(cfg.epsilon >= 0.0)) throw ConfigError("config: epsilon must be nonnegative");
    for (long cp : cfg.change_points)
      if (cp < 1) throw ConfigError("config: change points must be positive times");
  } else {
    if (cfg.trajectories.size() != cfg.r)
      throw ConfigError("config: doa requires r equal to the source count");
    cfg.steering().validate(cfg.T);
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  if (!doc.contains("experiment") || !doc["experiment"].is_string())
    throw ConfigError("config: missing required string key 'experiment'");

  ExperimentConfig cfg;
  const std::string kind = doc["experiment"].get<std::string>();
  if (kind == "subspace_tracking") {
    cfg.experiment = ExperimentKind::subspace_tracking;
    cfg.n = 200;
    cfg.r = 5;
    cfg.T = 2000;
    cfg.lambda = 0.02;
    cfg.sparsity = 0.8;
    cfg.epsilon = 1e-2;
    cfg.change_points = {1000, 1500};
  } else if (kind == "doa_tracking") {
    cfg.experiment = ExperimentKind::doa_tracking;
    cfg.n = 20;
    cfg.r = 3;
    cfg.T = 1000;
    cfg.lambda = 0.6;
    cfg.sparsity = 0.0;
    cfg.epsilon = 0.0;
    cfg.change_points = {};
    cfg.trajectories = default_trajectories();
  } else {
    throw ConfigError("config: experiment must be subspace_tracking or doa_tracking");
  }
  cfg.alpha = 0.9;
  cfg.p = 2.0;
  cfg.seeds = {1};
  cfg.algorithms = {Algorithm::alpha_opit, Algorithm::opit};
  cfg.output_dir = "out";
  cfg.noise = parse_noise(doc.contains("noise") ? doc["noise"] : json::object());

  std::set<std::string> allowed = {"experiment", "n",     "r",          "T",
                                   "lambda",     "alpha", "p",          "k",
                                   "noise",      "seeds", "algorithms", "output_dir"};
  if (cfg.experiment == ExperimentKind::subspace_tracking) {
    allowed.insert({"sparsity", "epsilon", "change_points"});
  } else {
    allowed.insert("trajectories");
  }
  reject_unknown_keys(doc, allowed, "config");

  if (doc.contains("n")) cfg.n = static_cast<std::size_t>(checked_count(doc["n"], "n", 2, 1000000));
  if (doc.contains("T")) cfg.T = checked_count(doc["T"], "T", 1, 100000000);
  if (doc.contains("lambda")) cfg.lambda = checked_real(doc["lambda"], "lambda");
  if (doc.contains("alpha")) cfg.alpha = checked_real(doc["alpha"], "alpha");
  if (doc.contains("p")) cfg.p = checked_real(doc["p"], "p");
  if (doc.contains("sparsity")) cfg.sparsity = checked_real(doc["sparsity"], "sparsity");
  if (doc.contains("epsilon")) cfg.epsilon = checked_real(doc["epsilon"], "epsilon");
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string())
      throw ConfigError("config: 'output_dir' must be a string");
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("change_points")) {
    if (!doc["change_points"].is_array())
      throw ConfigError("config: 'change_points' must be an array");
    cfg.change_points.clear();
    for (const auto& v : doc["change_points"])
      cfg.change_points.push_back(checked_count(v, "change_points", 1, 100000000));
  }
  if (doc.contains("seeds")) {
    if (!doc["seeds"].is_array() || doc["seeds"].empty())
      throw ConfigError("config: 'seeds' must be a nonempty array");
    cfg.seeds.clear();
    for (const auto& v : doc["seeds"])
      cfg.seeds.push_back(static_cast<std::uint64_t>(checked_count(v, "seeds", 0, 1000000000)));
  }
  if (doc.contains("algorithms")) {
    if (!doc["algorithms"].is_array() || doc["algorithms"].empty())
      throw ConfigError("config: 'algorithms' must be a nonempty array");
    cfg.algorithms.clear();
    for (const auto& v : doc["algorithms"]) {
      if (!v.is_string()) throw ConfigError("config: algorithm names must be strings");
      const std::string name = v.get<std::string>();
      if (name == "alpha_opit")
        cfg.algorithms.push_back(Algorithm::alpha_opit);
      else if (name == "opit")
        cfg.algorithms.push_back(Algorithm::opit);
      else
        throw ConfigError("config: unknown algorithm '" + name + "'");
    }
    std::set<std::string> uniq;
    for (Algorithm a : cfg.algorithms)
      if (!uniq.insert(algorithm_name(a)).second)
        throw ConfigError("config: algorithms must be distinct");
  }
  if (doc.contains("trajectories")) {
    if (!doc["trajectories"].is_array() || doc["trajectories"].empty())
      throw ConfigError("config: 'trajectories' must be a nonempty array");
    cfg.trajectories.clear();
    for (const auto& v : doc["trajectories"]) cfg.trajectories.push_back(parse_trajectory(v));
    // r follows the source count unless the config pins both consistently
    if (!doc.contains("r")) cfg.r = cfg.trajectories.size();
  }
  if (doc.contains("r")) cfg.r = static_cast<std::size_t>(checked_count(doc["r"], "r", 1, 100000));

  if (doc.contains("k")) {
    cfg.k = static_cast<std::size_t>(checked_count(doc["k"], "k", 1, 1000000));
  } else if (cfg.experiment == ExperimentKind::subspace_tracking) {
    cfg.k = tracker::default_threshold_k(cfg.n, cfg.r, cfg.sparsity);
  } else {
    cfg.k = cfg.n;  // steering subspaces are dense
  }

  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("config: cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json obj;
  obj["experiment"] = experiment_name(cfg.experiment);
  obj["n"] = cfg.n;
  obj["r"] = cfg.r;
  obj["T"] = cfg.T;
  obj["lambda"] = cfg.lambda;
  obj["alpha"] = cfg.alpha;
  obj["p"] = cfg.p;
  obj["k"] = cfg.k;
  obj["noise"] = {{"kind", streams::noise_kind_name(cfg.noise.kind)},
                  {"delta", cfg.noise.delta},
                  {"mu", cfg.noise.mu},
                  {"gamma", cfg.noise.gamma},
                  {"sigma_n", cfg.noise.sigma_n}};
  obj["seeds"] = cfg.seeds;
  json algs = json::array();
  for (Algorithm a : cfg.algorithms) algs.push_back(algorithm_name(a));
  obj["algorithms"] = algs;
  if (cfg.experiment == ExperimentKind::subspace_tracking) {
    obj["sparsity"] = cfg.sparsity;
    obj["epsilon"] = cfg.epsilon;
    obj["change_points"] = cfg.change_points;
  } else {
    json trajs = json::array();
    for (const auto& traj : cfg.trajectories) trajs.push_back(trajectory_to_json(traj));
    obj["trajectories"] = trajs;
  }
  return obj.dump();
}

std::string config_digest(const ExperimentConfig& cfg) {
  return digest::to_hex(digest::update(digest::kFnvOffset, config_to_json(cfg)));
}

namespace {

long long elapsed_ns(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                              t0)
      .count();
}

metrics::SepTrace run_subspace_one(const ExperimentConfig& cfg, Algorithm alg,
                                   std::uint64_t seed) {
  streams::StreamProcess stream(cfg.n, cfg.r, cfg.sparsity, cfg.epsilon, cfg.noise,
                                cfg.change_points, seed);
  const tracker::TrackerParams params = cfg.tracker_params(alg);
  auto state = tracker::init_tracker<double>(cfg.n, params, tracker_seed(seed));

  metrics::SepTrace trace;
  trace.algorithm = algorithm_name(alg);
  trace.seed = seed;
  trace.config_digest = config_digest(cfg);
  trace.records.reserve(static_cast<std::size_t>(cfg.T));

  std::uint64_t h = digest::kFnvOffset;
  for (long t = 1; t <= cfg.T; ++t) {
    const streams::Sample sample = stream.next();
    for (double v : sample.x) h = digest::update(h, v);
    const auto t0 = std::chrono::steady_clock::now();
    tracker::tracker_step(state, std::span<const double>(sample.x), params);
    const long long ns = elapsed_ns(t0);
    const RealMatrix u_true = linalg::qr_orthonormalize(sample.A_true).first;
    trace.records.push_back({t, metrics::sep(u_true, state.basis), state.last_weight, ns});
  }
  trace.stream_digest = digest::to_hex(h);
  return trace;
}

DoaTrace run_doa_one(const ExperimentConfig& cfg, Algorithm alg, std::uint64_t seed) {
  const doa::SteeringConfig steer = cfg.steering();
  Rng rng(seed);
  const tracker::TrackerParams params = cfg.tracker_params(alg);
  auto state = tracker::init_tracker<Complex>(cfg.n, params, tracker_seed(seed));

  DoaTrace trace;
  trace.algorithm = algorithm_name(alg);
  trace.seed = seed;
  trace.config_digest = config_digest(cfg);
  trace.records.reserve(static_cast<std::size_t>(cfg.T));
  trace.step_time_ns.reserve(static_cast<std::size_t>(cfg.T));

  std::uint64_t h = digest::kFnvOffset;
  for (long t = 1; t <= cfg.T; ++t) {
    const std::vector<Complex> x = doa::generate_doa_sample(steer, t, rng);
    for (const Complex& v : x) {
      h = digest::update(h, v.real());
      h = digest::update(h, v.imag());
    }
    const auto t0 = std::chrono::steady_clock::now();
    tracker::tracker_step(state, std::span<const Complex>(x), params);
    const long long ns = elapsed_ns(t0);

    const doa::EspritAngles est = doa::esprit_angles(state.basis);
    const std::vector<double> truth = doa::true_angles(steer, t);
    doa::DoaEstimate rec;
    rec.t = t;
    rec.truth = truth;
    rec.angles = doa::match_tracks(truth, est.degrees);
    trace.records.push_back(std::move(rec));
    trace.step_time_ns.push_back(ns);
    trace.clipped = trace.clipped || est.clipped;
  }
  trace.stream_digest = digest::to_hex(h);
  return trace;
}

}  // namespace

RunOutput run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  RunOutput out;
  for (std::uint64_t seed : cfg.seeds) {
    std::string first_digest;
    for (Algorithm alg : cfg.algorithms) {
      std::string run_digest;
      if (cfg.experiment == ExperimentKind::subspace_tracking) {
        out.sep_traces.push_back(run_subspace_one(cfg, alg, seed));
        run_digest = out.sep_traces.back().stream_digest;
      } else {
        out.doa_traces.push_back(run_doa_one(cfg, alg, seed));
        run_digest = out.doa_traces.back().stream_digest;
      }
      if (first_digest.empty())
        first_digest = run_digest;
      else if (first_digest != run_digest)
        throw std::logic_error("run_experiment: stream digest diverged across algorithms");
    }
  }
  return out;
}

namespace {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_outputs: cannot open '" + path.string() + "'");
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out.good()) throw IoError("write_outputs: write failed for '" + path.string() + "'");
}

json base_metadata(const ExperimentConfig& cfg, const std::string& algorithm,
                   std::uint64_t seed, const std::string& stream_digest) {
  json meta;
  meta["algorithm"] = algorithm;
  meta["seed"] = seed;
  meta["config"] = json::parse(config_to_json(cfg));
  meta["config_digest"] = config_digest(cfg);
  meta["stream_digest"] = stream_digest;
  meta["output_dir"] = cfg.output_dir;
  meta["version"] = kVersion;
  return meta;
}

}  // namespace

std::vector<std::string> write_outputs(const RunOutput& results, const ExperimentConfig& cfg,
                                       long stride, bool timing) {
  if (results.sep_traces.empty() && results.doa_traces.empty())
    throw ConfigError("write_outputs: nothing to write");
  if (stride < 1) throw ConfigError("write_outputs: stride must be positive");

  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("write_outputs: cannot create '" + dir.string() + "': " + ec.message());

  std::vector<std::string> written;
  for (const auto& trace : results.sep_traces) {
    const std::string stem = trace.algorithm + "_seed" + std::to_string(trace.seed);
    const fs::path csv_path = dir / (stem + ".csv");
    std::ofstream csv = open_output(csv_path);
    csv << "t,sep,weight,step_time_ns\n";
    for (std::size_t i = 0; i < trace.records.size(); i += static_cast<std::size_t>(stride)) {
      const auto& rec = trace.records[i];
      csv << rec.t << ',' << format_double(rec.sep) << ',' << format_double(rec.weight) << ','
          << (timing ? rec.step_time_ns : 0LL) << '\n';
    }
    finish_output(csv, csv_path);
    written.push_back(csv_path.string());

    json meta = base_metadata(cfg, trace.algorithm, trace.seed, trace.stream_digest);
    const metrics::TraceSummary s = metrics::summarize_trace(trace, 0);
    meta["summary"] = {{"median_sep", s.median_sep},
                       {"mean_sep", s.mean_sep},
                       {"last_decile_mean_sep", s.last_decile_mean_sep},
                       {"divergent_count", s.divergent_count},
                       {"median_step_time_ns", s.median_step_time_ns}};
    const fs::path meta_path = dir / (stem + ".meta.json");
    std::ofstream mf = open_output(meta_path);
    mf << meta.dump(2) << '\n';
    finish_output(mf, meta_path);
    written.push_back(meta_path.string());
  }

  for (const auto& trace : results.doa_traces) {
    const std::string stem = trace.algorithm + "_seed" + std::to_string(trace.seed);
    const fs::path csv_path = dir / (stem + ".csv");
    std::ofstream csv = open_output(csv_path);
    csv << "t,track,theta_est_deg,theta_true_deg,abs_err_deg\n";
    for (std::size_t i = 0; i < trace.records.size(); i += static_cast<std::size_t>(stride)) {
      const auto& rec = trace.records[i];
      for (std::size_t k = 0; k < rec.angles.size(); ++k) {
        const double err = std::abs(rec.angles[k] - rec.truth[k]);
        csv << rec.t << ',' << (k + 1) << ',' << format_double(rec.angles[k]) << ','
            << format_double(rec.truth[k]) << ',' << format_double(err) << '\n';
      }
    }
    finish_output(csv, csv_path);
    written.push_back(csv_path.string());

    json meta = base_metadata(cfg, trace.algorithm, trace.seed, trace.stream_digest);
    const std::size_t tracks = trace.records.empty() ? 0 : trace.records.front().angles.size();
    json med_err = json::array();
    for (std::size_t k = 0; k < tracks; ++k) {
      std::vector<double> errs;
      errs.reserve(trace.records.size());
      for (const auto& rec : trace.records) errs.push_back(std::abs(rec.angles[k] - rec.truth[k]));
      med_err.push_back(metrics::median(std::move(errs)));
    }
    std::vector<double> times;
    times.reserve(trace.step_time_ns.size());
    for (long long ns : trace.step_time_ns) times.push_back(static_cast<double>(ns));
    meta["summary"] = {{"median_abs_err_deg", med_err},
                       {"clipped", trace.clipped},
                       {"median_step_time_ns", metrics::median(std::move(times))}};
    const fs::path meta_path = dir / (stem + ".meta.json");
    std::ofstream mf = open_output(meta_path);
    mf << meta.dump(2) << '\n';
    finish_output(mf, meta_path);
    written.push_back(meta_path.string());
  }
  return written;
}

}  // namespace sst::harness
