// Times the OpenMP kernel paths against their forced-serial loops and the
// plain triple-loop references the tests use as oracles. The serial and
// parallel paths of each kernel must agree bit for bit (output-partitioned
// loops, fixed accumulation order); the bench asserts that on every shape.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "reference/reference.hpp"
#include "sst/linalg.hpp"
#include "sst/parallel.hpp"
#include "sst/rng.hpp"
#include "sst/streams.hpp"
#include "sst/tracker.hpp"

namespace linalg = sst::linalg;
namespace par = sst::par;
namespace streams = sst::streams;
namespace tracker = sst::tracker;
using sst::RealMatrix;

namespace {

using Clock = std::chrono::steady_clock;

double median_us(const std::function<void()>& fn, int reps) {
  std::vector<double> us;
  us.reserve(std::size_t(reps));
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    fn();
    us.push_back(std::chrono::duration<double, std::micro>(Clock::now() - t0).count());
  }
  std::sort(us.begin(), us.end());
  return us[us.size() / 2];
}

RealMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  sst::Rng rng(seed);
  RealMatrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

// Runs fn twice: once with the parallel gate forced shut, once with the
// default gate. Returns {serial_us, parallel_us} and checks both results
// are identical via the caller-provided comparison.
struct KernelRow {
  double serial_us = 0.0;
  double parallel_us = 0.0;
  bool identical = false;
};

template <typename Result>
KernelRow time_kernel(const std::function<Result()>& fn, int reps) {
  KernelRow row;
  const std::size_t gate = par::min_parallel_work();

  par::set_min_parallel_work(std::size_t(-1));
  const Result serial = fn();
  row.serial_us = median_us([&] { (void)fn(); }, reps);

  par::set_min_parallel_work(1);
  const Result parallel = fn();
  row.parallel_us = median_us([&] { (void)fn(); }, reps);

  par::set_min_parallel_work(gate);
  row.identical = serial == parallel;
  return row;
}

void print_row(const char* name, const char* shape, double naive_us, const KernelRow& row) {
  std::printf("%-22s %-22s %10.1f %10.1f %10.1f %7.2fx   %s\n", name, shape, naive_us,
              row.serial_us, row.parallel_us, row.serial_us / row.parallel_us,
              row.identical ? "yes" : "NO");
}

void bench_matmul(std::size_t n, std::size_t r, int reps) {
  const RealMatrix a = random_matrix(n, r, 11);
  const RealMatrix e = random_matrix(r, r, 12);
  const double naive = median_us([&] { (void)ref::naive_matmul(a, e); }, reps);
  const auto row = time_kernel<RealMatrix>([&] { return linalg::matmul(a, e); }, reps);
  char shape[64];
  std::snprintf(shape, sizeof shape, "%zux%zu * %zux%zu", n, r, r, r);
  print_row("matmul", shape, naive, row);
}

void bench_gram(std::size_t n, std::size_t r, int reps) {
  const RealMatrix u = random_matrix(n, r, 21);
  const RealMatrix v = random_matrix(n, r, 22);
  const double naive = median_us([&] { (void)ref::naive_conj_transpose_matmul(u, v); }, reps);
  const auto row =
      time_kernel<RealMatrix>([&] { return linalg::conj_transpose_matmul(u, v); }, reps);
  char shape[64];
  std::snprintf(shape, sizeof shape, "(%zux%zu)^H * %zux%zu", n, r, n, r);
  print_row("conj_transpose_matmul", shape, naive, row);
}

void bench_outer(std::size_t n, std::size_t r, int reps) {
  sst::Rng rng(31);
  std::vector<double> x(n), w(r);
  for (auto& v : x) v = rng.normal();
  for (auto& v : w) v = rng.normal();
  const RealMatrix base = random_matrix(n, r, 32);
  // Returns the updated matrix so the serial/parallel comparison sees it.
  const auto run = [&] {
    RealMatrix s = base;
    linalg::add_scaled_outer(s, 0.25, std::span<const double>(x), std::span<const double>(w));
    return s;
  };
  const double naive = median_us(
      [&] {
        RealMatrix s = base;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < r; ++j) s(i, j) += 0.25 * x[i] * w[j];
      },
      reps);
  const auto row = time_kernel<RealMatrix>(run, reps);
  char shape[64];
  std::snprintf(shape, sizeof shape, "%zux%zu += x w^H", n, r);
  print_row("add_scaled_outer", shape, naive, row);
}

void bench_qr(std::size_t n, std::size_t r, int reps) {
  const RealMatrix m = random_matrix(n, r, 41);
  const double naive = median_us([&] { (void)ref::cgs_orthonormalize(m); }, reps);
  const auto row = time_kernel<RealMatrix>(
      [&] { return linalg::qr_orthonormalize(m).first; }, reps);
  char shape[64];
  std::snprintf(shape, sizeof shape, "%zux%zu", n, r);
  print_row("qr_orthonormalize", shape, naive, row);
}

void bench_tracker_step(std::size_t n, std::size_t r, int steps) {
  streams::NoiseSpec noise;
  noise.kind = streams::NoiseKind::gaussian_only;
  noise.delta = 0.0;
  noise.sigma_n = 0.1;
  streams::StreamProcess proc(n, r, 0.8, 1e-2, noise, {}, 5);
  std::vector<std::vector<double>> xs;
  xs.reserve(std::size_t(steps));
  for (int i = 0; i < steps; ++i) xs.push_back(proc.next().x);

  tracker::TrackerParams params;
  params.rank = r;
  params.keep = tracker::default_threshold_k(n, r, 0.8);
  params.lambda = 0.02;
  params.alpha = 0.9;
  params.robust = true;

  const auto run_all = [&](bool parallel) {
    const std::size_t gate = par::min_parallel_work();
    par::set_min_parallel_work(parallel ? 1 : std::size_t(-1));
    auto st = tracker::init_tracker<double>(n, params, 7);
    std::vector<double> step_us(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto t0 = Clock::now();
      tracker::tracker_step(st, std::span<const double>(xs[i]), params);
      step_us[i] = std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
    }
    par::set_min_parallel_work(gate);
    std::sort(step_us.begin(), step_us.end());
    return std::pair{step_us[step_us.size() / 2], st.basis};
  };

  const auto [serial_us, serial_basis] = run_all(false);
  const auto [parallel_us, parallel_basis] = run_all(true);
  char shape[64];
  std::snprintf(shape, sizeof shape, "n=%zu r=%zu", n, r);
  std::printf("%-22s %-22s %10s %10.1f %10.1f %7.2fx   %s\n", "tracker_step", shape, "-",
              serial_us, parallel_us, serial_us / parallel_us,
              serial_basis == parallel_basis ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 21;
  if (argc > 1) reps = std::atoi(argv[1]);
  if (reps < 3) reps = 3;

  std::printf("threads: %d, parallel gate: %zu scalar ops, reps per timing: %d\n",
              par::max_threads(), par::min_parallel_work(), reps);
  std::printf("%-22s %-22s %10s %10s %10s %8s   %s\n", "kernel", "shape", "naive_us",
              "serial_us", "par_us", "speedup", "identical");

  bench_matmul(2000, 8, reps);
  bench_matmul(2000, 64, reps);
  bench_gram(2000, 8, reps);
  bench_gram(2000, 64, reps);
  bench_outer(2000, 8, reps);
  bench_outer(100000, 8, reps);
  bench_qr(2000, 8, reps);
  bench_qr(2000, 64, reps);

  std::printf("\nend-to-end step (median of %d steps, k = default, robust on):\n", 300);
  bench_tracker_step(1000, 5, 300);
  bench_tracker_step(2000, 5, 300);
  bench_tracker_step(4000, 5, 300);
  return 0;
}
