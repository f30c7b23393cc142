#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sst/harness.hpp"

namespace harness = sst::harness;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

const char* kSmokeSubspace = R"({
  "experiment": "subspace_tracking",
  "n": 30, "r": 3, "T": 80,
  "sparsity": 0.5, "epsilon": 0.01,
  "change_points": [40],
  "noise": {"kind": "cauchy_mix", "delta": 0.1, "sigma_n": 0.1},
  "seeds": [1, 2],
  "output_dir": "harness_test_out"
})";

const char* kSmokeDoa = R"({
  "experiment": "doa_tracking",
  "n": 10, "T": 60, "lambda": 0.5,
  "trajectories": [
    {"kind": "linear", "start": -30.0, "slope": 0.0},
    {"kind": "linear", "start": 10.0, "slope": 0.0},
    {"kind": "sinusoid", "center": 40.0, "amplitude": 5.0, "period": 50}
  ],
  "noise": {"kind": "gaussian_only", "sigma_n": 0.001},
  "seeds": [3],
  "output_dir": "harness_test_out_doa"
})";

}  // namespace

TEST_CASE("a minimal subspace config resolves to the documented defaults") {
  const auto cfg = harness::parse_config(R"({"experiment": "subspace_tracking"})");
  CHECK(cfg.experiment == harness::ExperimentKind::subspace_tracking);
  CHECK(cfg.n == 200);
  CHECK(cfg.r == 5);
  CHECK(cfg.T == 2000);
  CHECK(cfg.lambda == 0.02);
  CHECK(cfg.alpha == 0.9);
  CHECK(cfg.p == 2.0);
  CHECK(cfg.sparsity == 0.8);
  CHECK(cfg.epsilon == 1e-2);
  CHECK(cfg.k == 40);  // round((1 - 0.8) * 200)
  CHECK(cfg.change_points == std::vector<long>{1000, 1500});
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1});
  REQUIRE(cfg.algorithms.size() == 2);
  CHECK(cfg.algorithms[0] == harness::Algorithm::alpha_opit);
  CHECK(cfg.algorithms[1] == harness::Algorithm::opit);
  CHECK(cfg.noise.kind == sst::streams::NoiseKind::cauchy_mix);
  CHECK(cfg.noise.delta == 0.1);
  CHECK(cfg.noise.sigma_n == 0.1);
}

TEST_CASE("a minimal doa config resolves sources from the default trajectories") {
  const auto cfg = harness::parse_config(R"({"experiment": "doa_tracking"})");
  CHECK(cfg.experiment == harness::ExperimentKind::doa_tracking);
  CHECK(cfg.n == 20);
  CHECK(cfg.r == 3);
  CHECK(cfg.T == 1000);
  CHECK(cfg.lambda == 0.6);
  CHECK(cfg.k == 20);  // dense thresholding for the array
  REQUIRE(cfg.trajectories.size() == 3);
  CHECK(cfg.trajectories[0].kind == sst::doa::Trajectory::Kind::linear);
  CHECK(cfg.steering().sources() == 3);
}

TEST_CASE("tracker params map per algorithm") {
  const auto cfg = harness::parse_config(R"({"experiment": "subspace_tracking"})");
  const auto robust = cfg.tracker_params(harness::Algorithm::alpha_opit);
  const auto plain = cfg.tracker_params(harness::Algorithm::opit);
  CHECK(robust.robust);
  CHECK_FALSE(plain.robust);
  CHECK(robust.rank == cfg.r);
  CHECK(robust.keep == cfg.k);
  CHECK(robust.lambda == cfg.lambda);
  CHECK(plain.lambda == cfg.lambda);
}

TEST_CASE("config validation rejects out-of-range and unknown fields") {
  CHECK_THROWS_WITH_AS(
      (void)harness::parse_config(R"({"experiment": "subspace_tracking", "alpha": 1.5})"),
      doctest::Contains("alpha must lie in (0,1)"), sst::ConfigError);
  CHECK_THROWS_AS((void)harness::parse_config(R"({"n": 100})"), sst::ConfigError);
  CHECK_THROWS_AS(
      (void)harness::parse_config(R"({"experiment": "subspace_tracking", "banana": 1})"),
      sst::ConfigError);
  CHECK_THROWS_AS(
      (void)harness::parse_config(R"({"experiment": "doa_tracking", "sparsity": 0.5})"),
      sst::ConfigError);
  CHECK_THROWS_AS(
      (void)harness::parse_config(R"({"experiment": "subspace_tracking", "seeds": [1, 1]})"),
      sst::ConfigError);
  CHECK_THROWS_AS((void)harness::parse_config("{nope"), sst::ConfigError);
  CHECK_THROWS_AS(
      (void)harness::parse_config(
          R"({"experiment": "subspace_tracking", "algorithms": ["gradient_descent"]})"),
      sst::ConfigError);
}

TEST_CASE("config digest covers content but not the output directory") {
  auto base = harness::parse_config(kSmokeSubspace);
  auto moved = base;
  moved.output_dir = "somewhere_else";
  CHECK(harness::config_digest(base) == harness::config_digest(moved));

  auto tweaked = base;
  tweaked.lambda = 0.2;
  CHECK(harness::config_digest(base) != harness::config_digest(tweaked));

  CHECK(harness::config_digest(base) ==
        harness::config_digest(harness::parse_config(kSmokeSubspace)));
  CHECK(harness::config_digest(base).size() == 16);
}

TEST_CASE("subspace runs share streams across algorithms and reproduce exactly") {
  auto cfg = harness::parse_config(kSmokeSubspace);
  const auto out = harness::run_experiment(cfg);
  REQUIRE(out.sep_traces.size() == 4);  // 2 seeds x 2 algorithms
  CHECK(out.doa_traces.empty());

  for (const auto& trace : out.sep_traces) {
    CHECK(trace.records.size() == 80);
    CHECK(trace.config_digest == harness::config_digest(cfg));
  }
  // same seed, different algorithm: identical stream fingerprint
  CHECK(out.sep_traces[0].seed == out.sep_traces[1].seed);
  CHECK(out.sep_traces[0].algorithm != out.sep_traces[1].algorithm);
  CHECK(out.sep_traces[0].stream_digest == out.sep_traces[1].stream_digest);
  // different seed: different stream
  CHECK(out.sep_traces[0].stream_digest != out.sep_traces[2].stream_digest);

  const auto again = harness::run_experiment(cfg);
  for (std::size_t i = 0; i < out.sep_traces.size(); ++i) {
    CHECK(again.sep_traces[i].stream_digest == out.sep_traces[i].stream_digest);
    for (std::size_t j = 0; j < out.sep_traces[i].records.size(); ++j) {
      CHECK(again.sep_traces[i].records[j].sep == out.sep_traces[i].records[j].sep);
      CHECK(again.sep_traces[i].records[j].weight == out.sep_traces[i].records[j].weight);
    }
  }
}

TEST_CASE("subspace outputs land on disk with the documented format") {
  auto cfg = harness::parse_config(kSmokeSubspace);
  fs::remove_all(cfg.output_dir);
  const auto results = harness::run_experiment(cfg);
  const auto paths = harness::write_outputs(results, cfg);
  REQUIRE(paths.size() == 8);  // CSV + JSON per (algorithm, seed)

  std::size_t csv_count = 0, json_count = 0;
  for (const auto& p : paths) {
    CHECK(fs::exists(p));
    if (p.ends_with(".csv")) ++csv_count;
    if (p.ends_with(".meta.json")) ++json_count;
  }
  CHECK(csv_count == 4);
  CHECK(json_count == 4);

  const fs::path csv_path = fs::path(cfg.output_dir) / "alpha_opit_seed1.csv";
  REQUIRE(fs::exists(csv_path));
  const auto rows = lines_of(slurp(csv_path));
  REQUIRE(rows.size() == 81);  // header + T
  CHECK(rows[0] == "t,sep,weight,step_time_ns");
  CHECK(rows[1].starts_with("1,"));
  CHECK(rows[1].ends_with(",0"));  // timing off: reproducible zero column
  CHECK(rows[80].starts_with("80,"));

  const fs::path meta_path = fs::path(cfg.output_dir) / "alpha_opit_seed1.meta.json";
  const json meta = json::parse(slurp(meta_path));
  CHECK(meta.at("algorithm") == "alpha_opit");
  CHECK(meta.at("seed") == 1);
  CHECK(meta.at("config_digest") == harness::config_digest(cfg));
  CHECK(meta.at("stream_digest") == results.sep_traces[0].stream_digest);
  CHECK(meta.at("config").at("n") == 30);
  CHECK(meta.at("summary").contains("median_sep"));
  CHECK(meta.at("summary").contains("divergent_count"));

  // byte-identical rewrite
  const std::string first = slurp(csv_path);
  const auto rerun = harness::run_experiment(cfg);
  harness::write_outputs(rerun, cfg);
  CHECK(slurp(csv_path) == first);

  fs::remove_all(cfg.output_dir);
}

TEST_CASE("stride thins csv rows but keeps the first record") {
  auto cfg = harness::parse_config(kSmokeSubspace);
  cfg.output_dir = "harness_test_out_stride";
  cfg.seeds = {1};
  fs::remove_all(cfg.output_dir);
  const auto results = harness::run_experiment(cfg);
  harness::write_outputs(results, cfg, 10, false);
  const auto rows = lines_of(slurp(fs::path(cfg.output_dir) / "opit_seed1.csv"));
  REQUIRE(rows.size() == 9);  // header + t = 1, 11, ..., 71
  CHECK(rows[1].starts_with("1,"));
  CHECK(rows[2].starts_with("11,"));
  CHECK(rows[8].starts_with("71,"));
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("timing mode fills the step time column with positive values") {
  auto cfg = harness::parse_config(kSmokeSubspace);
  cfg.output_dir = "harness_test_out_timing";
  cfg.seeds = {1};
  cfg.T = 20;
  fs::remove_all(cfg.output_dir);
  const auto results = harness::run_experiment(cfg);
  harness::write_outputs(results, cfg, 1, true);
  const auto rows = lines_of(slurp(fs::path(cfg.output_dir) / "alpha_opit_seed1.csv"));
  REQUIRE(rows.size() == 21);
  bool positive = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto last_comma = rows[i].rfind(',');
    if (std::stoll(rows[i].substr(last_comma + 1)) > 0) positive = true;
  }
  CHECK(positive);
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("doa runs emit one labeled row per source per step") {
  auto cfg = harness::parse_config(kSmokeDoa);
  fs::remove_all(cfg.output_dir);
  const auto results = harness::run_experiment(cfg);
  REQUIRE(results.doa_traces.size() == 2);
  CHECK(results.sep_traces.empty());
  for (const auto& trace : results.doa_traces) {
    CHECK(trace.records.size() == 60);
    CHECK(trace.step_time_ns.size() == 60);
    for (const auto& rec : trace.records) {
      CHECK(rec.angles.size() == 3);
      CHECK(rec.truth.size() == 3);
    }
  }

  const auto paths = harness::write_outputs(results, cfg);
  const fs::path csv_path = fs::path(cfg.output_dir) / "alpha_opit_seed3.csv";
  REQUIRE(fs::exists(csv_path));
  const auto rows = lines_of(slurp(csv_path));
  REQUIRE(rows.size() == 1 + 3 * 60);
  CHECK(rows[0] == "t,track,theta_est_deg,theta_true_deg,abs_err_deg");
  CHECK(rows[1].starts_with("1,1,"));
  CHECK(rows[2].starts_with("1,2,"));
  CHECK(rows[3].starts_with("1,3,"));
  CHECK(rows[4].starts_with("2,1,"));

  const json meta =
      json::parse(slurp(fs::path(cfg.output_dir) / "alpha_opit_seed3.meta.json"));
  CHECK(meta.at("summary").at("median_abs_err_deg").size() == 3);
  CHECK(meta.at("summary").contains("clipped"));
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("load_config reads from disk and rejects missing files") {
  const fs::path tmp = "harness_test_cfg.json";
  {
    std::ofstream out(tmp);
    out << kSmokeSubspace;
  }
  const auto cfg = harness::load_config(tmp.string());
  CHECK(cfg.n == 30);
  fs::remove(tmp);
  CHECK_THROWS_AS((void)harness::load_config("no_such_file.json"), sst::IoError);
}

TEST_CASE("derived tracker seeds decorrelate from stream seeds") {
  CHECK(harness::tracker_seed(1) != 1);
  CHECK(harness::tracker_seed(1) == harness::tracker_seed(1));
  CHECK(harness::tracker_seed(1) != harness::tracker_seed(2));
}
