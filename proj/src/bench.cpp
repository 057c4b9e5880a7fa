#include "mono3d/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "mono3d/csv.hpp"
#include "mono3d/errors.hpp"
#include "mono3d/log.hpp"
#include "mono3d/worker_pool.hpp"

namespace mono3d {

double amdahl_bound(double sigma_s, double phi_s, unsigned p) {
  if (!(sigma_s >= 0.0) || !(phi_s >= 0.0) || !(sigma_s + phi_s > 0.0) || p < 1)
    throw InvalidInput("amdahl_bound: need sigma,phi >= 0, sigma+phi > 0, p >= 1");
  return (sigma_s + phi_s) / (sigma_s + phi_s / static_cast<double>(p));
}

AmdahlFit fit_amdahl(std::span<const unsigned> workers, std::span<const double> seconds) {
  if (workers.size() != seconds.size() || workers.size() < 2)
    throw InvalidInput("fit_amdahl: need at least 2 (workers, time) samples");
  // Linear least squares with basis [1, 1/p].
  double s11 = 0, s1x = 0, sxx = 0, s1y = 0, sxy = 0;
  for (std::size_t i = 0; i < workers.size(); ++i) {
    const double x = 1.0 / static_cast<double>(workers[i]);
    const double y = seconds[i];
    s11 += 1.0;
    s1x += x;
    sxx += x * x;
    s1y += y;
    sxy += x * y;
  }
  const double det = s11 * sxx - s1x * s1x;
  if (std::abs(det) < 1e-30) throw InvalidInput("fit_amdahl: degenerate worker counts");
  AmdahlFit fit;
  fit.sigma_s = (sxx * s1y - s1x * sxy) / det;
  fit.phi_s = (s11 * sxy - s1x * s1y) / det;
  return fit;
}

namespace {

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

BenchResult run_bench(const Scenario& scenario, const KernelSpec& kernel,
                      std::span<const unsigned> worker_counts, int repetitions,
                      double resolution_m, std::uint64_t seed) {
  if (repetitions < 3) throw InvalidInput("run_bench: repetitions must be >= 3");
  if (worker_counts.empty()) throw InvalidInput("run_bench: no worker counts");

  const GridDecomposition grid =
      decompose(scenario.schedule.poses.front(), scenario.scene.reach, resolution_m);

  // Detections are fixed up front so every worker count filters identical
  // input and posteriors are comparable bit for bit.
  std::vector<Pose> poses = scenario.schedule.poses;
  std::vector<DetectionSet> dets;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    DetectionSet d = simulate_detections(scenario.scene, poses[i], scenario.camera);
    d.viewpoint_index = static_cast<int>(i);
    if (scenario.noise) {
      NoiseModel noise = *scenario.noise;
      noise.rng_seed = seed + i;
      d = apply_noise(d, noise, scenario.camera);
    }
    dets.push_back(std::move(d));
  }

  BenchResult result;
  result.kernel = kernel.kind;

  std::vector<double> reference;  // posterior weights at the first worker count
  for (const unsigned p : worker_counts) {
    WorkerPool pool(p);
    std::vector<double> update_times;
    ProbabilityGrid state;
    for (int rep = 0; rep < repetitions; ++rep) {
      state = make_uniform_state(grid);
      std::vector<double> field(grid.cell_count());
      for (std::size_t i = 0; i < poses.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        pool.run(grid.cell_count(), [&](std::size_t begin, std::size_t end) {
          compute_likelihood_field(grid, poses[i], scenario.camera, dets[i], kernel, begin,
                                   end, field);
        });
        apply_likelihood_field(state, field);
        const auto t1 = std::chrono::steady_clock::now();
        update_times.push_back(std::chrono::duration<double>(t1 - t0).count());
      }
    }
    if (reference.empty()) {
      reference = state.weights;
    } else if (reference.size() != state.weights.size() ||
               std::memcmp(reference.data(), state.weights.data(),
                           reference.size() * sizeof(double)) != 0) {
      throw NondeterministicOutput("posterior differs at worker count " + std::to_string(p));
    }
    result.worker_counts.push_back(p);
    result.median_wall_s.push_back(median(update_times));
    log_info("bench: workers=" + std::to_string(p) +
             " median_update_s=" + format_double(result.median_wall_s.back()));
  }

  if (result.worker_counts.size() >= 2) {
    const AmdahlFit fit = fit_amdahl(result.worker_counts, result.median_wall_s);
    result.sequential_s = fit.sigma_s;
    result.parallel_s = fit.phi_s;
    result.max_speedup = fit.sigma_s > 0.0
                             ? (fit.sigma_s + fit.phi_s) / fit.sigma_s
                             : std::numeric_limits<double>::infinity();
  } else {
    result.sequential_s = result.median_wall_s.front();
    result.parallel_s = 0.0;
    result.max_speedup = 1.0;
  }
  return result;
}

void write_bench_csv(const BenchResult& result, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "kernel,workers,median_wall_s,speedup\n";
  const char* kname = result.kernel == KernelKind::Square ? "square" : "gaussian";
  const double t1 = result.median_wall_s.empty() ? 0.0 : result.median_wall_s.front();
  for (std::size_t i = 0; i < result.worker_counts.size(); ++i)
    out << kname << ',' << result.worker_counts[i] << ','
        << format_double(result.median_wall_s[i]) << ','
        << format_double(result.median_wall_s[i] > 0 ? t1 / result.median_wall_s[i] : 0.0)
        << '\n';
  out << "# fit: sigma_s=" << format_double(result.sequential_s)
      << " phi_s=" << format_double(result.parallel_s)
      << " max_speedup=" << format_double(result.max_speedup) << '\n';
}

}  // namespace mono3d
