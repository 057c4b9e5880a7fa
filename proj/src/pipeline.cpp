#include "mono3d/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <string>

#include "mono3d/csv.hpp"
#include "mono3d/errors.hpp"
#include "mono3d/log.hpp"

namespace mono3d {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kKmeansStream = 0x6b6d65616e73ull;  // distinct from viewpoint ids

std::vector<std::vector<int>> viewpoint_orders(std::size_t count, bool permute) {
  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  if (!permute) return {order};
  if (count > 6)
    throw ConfigError("permuting " + std::to_string(count) +
                      " viewpoints would need " + std::to_string(count) +
                      "! runs; pass --no-permute");
  std::vector<std::vector<int>> orders;
  do {
    orders.push_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return orders;
}

struct EstimateRow {
  std::size_t perm_index;
  std::string object_id;
  std::optional<Vec3> truth;
  Vec3 estimate;
};

void write_estimates_csv(std::span<const EstimateRow> rows,
                         const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "permutation,object_id,truth_x_m,truth_y_m,truth_z_m,"
         "est_x_m,est_y_m,est_z_m,abs_err_x_m,abs_err_y_m,abs_err_z_m,euclidean_m\n";
  for (const EstimateRow& r : rows) {
    out << r.perm_index << ',' << r.object_id << ',';
    if (r.truth) {
      const Vec3 err{std::abs(r.truth->x - r.estimate.x), std::abs(r.truth->y - r.estimate.y),
                     std::abs(r.truth->z - r.estimate.z)};
      out << format_double(r.truth->x) << ',' << format_double(r.truth->y) << ','
          << format_double(r.truth->z) << ',' << format_double(r.estimate.x) << ','
          << format_double(r.estimate.y) << ',' << format_double(r.estimate.z) << ','
          << format_double(err.x) << ',' << format_double(err.y) << ','
          << format_double(err.z) << ',' << format_double(norm(*r.truth - r.estimate))
          << '\n';
    } else {
      out << ",,," << format_double(r.estimate.x) << ',' << format_double(r.estimate.y)
          << ',' << format_double(r.estimate.z) << ",,,,\n";
    }
  }
}

void print_summary(const SimulateOutcome& outcome) {
  std::cout << "permutations_run: " << outcome.permutations_run;
  if (outcome.permutations_failed > 0)
    std::cout << " (" << outcome.permutations_failed << " failed)";
  std::cout << "\n";
  if (!outcome.has_report) {
    std::cout << "metrics: skipped (no ground truth)\n";
    return;
  }
  const ErrorReport& r = outcome.report;
  std::cout << "metric            value        unit\n"
            << "mae               " << format_double(r.mae) << " m\n"
            << "mse               " << format_double(r.mse) << " m^2\n"
            << "rmse              " << format_double(r.rmse) << " m\n"
            << "mape              " << format_double(r.mape) << " percent\n"
            << "mean_euclidean    " << format_double(r.mean_euclidean) << " m\n";
}

struct PreparedRun {
  Scenario scenario;
  ResolvedSettings settings;
  GridDecomposition grid;
};

PreparedRun prepare(const RunConfig& config) {
  PreparedRun run{load_scene(config.scenario_path), {}, {}};
  run.settings = resolve_settings(config, run.scenario);
  run.grid = decompose(run.scenario.schedule.poses.front(), run.scenario.scene.reach,
                       run.settings.resolution_m);
  return run;
}

SimulateOutcome run_pipeline(const RunConfig& config, const PreparedRun& run,
                             const std::vector<std::vector<DetectionSet>>& fixed_dets) {
  const bool replay = !fixed_dets.empty();
  const auto orders = viewpoint_orders(run.scenario.schedule.poses.size(),
                                       replay ? false : config.permute);

  std::filesystem::create_directories(config.out_dir);

  std::vector<EstimateRow> rows;
  std::vector<MatchedPair> all_pairs;
  const bool have_truth = !run.scenario.scene.objects.empty();

  // Under noise a single permutation can legitimately fail (e.g. dropout
  // erases an object from every viewpoint); that loses one sample, not the
  // experiment. Only a run with no surviving permutation is an error.
  int failed = 0;
  std::exception_ptr last_error;
  for (std::size_t pi = 0; pi < orders.size(); ++pi) {
    TraceSink sink;
    if (config.trace && pi == 0) {
      sink = [&](std::size_t update_index, int viewpoint_index, const ProbabilityGrid& state) {
        (void)update_index;
        write_trace_csv(state, run.settings.threshold,
                        config.out_dir /
                            ("trace_vp" + std::to_string(viewpoint_index) + ".csv"));
      };
    }

    try {
      std::vector<Vec3> centers;
      if (replay) {
        // Replayed boxes are used as-is; noise settings only apply to simulation.
        std::vector<Pose> poses;
        for (const int idx : orders[pi]) poses.push_back(run.scenario.schedule.poses[idx]);
        ProbabilityGrid posterior =
            run_filter(run.grid, poses, fixed_dets[pi], run.scenario.camera,
                       run.settings.kernel, nullptr, sink ? &sink : nullptr);
        const int k = object_count(fixed_dets[pi]);
        const auto points = extract_points(posterior, run.settings.threshold);
        const ClusterResult clusters =
            kmeans(points, k, derive_seed(config.seed, pi, kKmeansStream),
                   config.weighted_denom);
        for (const Cluster& c : clusters.clusters)
          centers.push_back(config.center == CenterMethod::Weighted ? c.weighted_center
                                                                    : c.geometric_center);
      } else {
        centers = estimate_once(run.scenario, run.grid, run.settings, orders[pi], pi,
                                config.seed, config.center, config.weighted_denom,
                                sink ? &sink : nullptr);
      }

      if (have_truth) {
        const auto pairs = match_estimates(run.scenario.scene.objects, centers);
        for (const MatchedPair& p : pairs) {
          rows.push_back({pi, p.object_id, p.truth, p.estimate});
          all_pairs.push_back(p);
        }
      } else {
        for (std::size_t c = 0; c < centers.size(); ++c)
          rows.push_back({pi, "cluster_" + std::to_string(c), std::nullopt, centers[c]});
      }
    } catch (const AlgorithmError& e) {
      ++failed;
      last_error = std::current_exception();
      log_warn("permutation " + std::to_string(pi) + " failed: " + e.what());
    }
  }
  if (failed == static_cast<int>(orders.size())) std::rethrow_exception(last_error);

  write_estimates_csv(rows, config.out_dir / "estimates.csv");

  SimulateOutcome outcome;
  outcome.permutations_run = static_cast<int>(orders.size());
  outcome.permutations_failed = failed;
  if (have_truth) {
    outcome.report = compute_errors(all_pairs);
    outcome.has_report = true;
    write_metrics_csv(outcome.report, config.out_dir / "metrics.csv");
    write_per_object_csv(outcome.report, config.out_dir / "per_object.csv");
  }
  print_summary(outcome);
  return outcome;
}

}  // namespace

ResolvedSettings resolve_settings(const RunConfig& config, const Scenario& scenario) {
  ResolvedSettings s;
  s.kernel.kind = config.kernel.value_or(
      scenario.filter.kernel.value_or(KernelKind::Gaussian));
  s.kernel.sigma_divisor =
      config.sigma_divisor.value_or(scenario.filter.sigma_divisor.value_or(2.0));
  if (s.kernel.sigma_divisor <= 0) throw ConfigError("sigma divisor must be > 0");
  s.resolution_m = config.resolution_m.value_or(scenario.filter.resolution_m.value_or(0.01));
  if (s.resolution_m <= 0) throw ConfigError("resolution must be > 0");
  s.threshold = config.threshold.value_or(scenario.filter.threshold.value_or(0.5));
  if (s.threshold < 0 || s.threshold >= 1) throw ConfigError("threshold must be in [0, 1)");

  // Noise: any flag overrides that field of the scenario block; all-zero
  // noise collapses to "none".
  NoiseModel noise = scenario.noise.value_or(NoiseModel{});
  if (config.noise_center_sigma) noise.center_sigma = *config.noise_center_sigma;
  if (config.noise_size_sigma) noise.size_sigma = *config.noise_size_sigma;
  if (config.noise_dropout) noise.dropout_prob = *config.noise_dropout;
  if (noise.center_sigma < 0 || noise.size_sigma < 0)
    throw ConfigError("noise sigmas must be >= 0");
  if (noise.dropout_prob < 0 || noise.dropout_prob > 1)
    throw ConfigError("dropout must be in [0, 1]");
  if (noise.center_sigma > 0 || noise.size_sigma > 0 || noise.dropout_prob > 0)
    s.noise = noise;
  return s;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t permutation,
                          std::uint64_t stream) {
  std::uint64_t s = splitmix64(master ^ 0xA076'1D64'78BD'642Full);
  s = splitmix64(s + permutation);
  return splitmix64(s + stream);
}

std::vector<Vec3> estimate_once(const Scenario& scenario, const GridDecomposition& grid,
                                const ResolvedSettings& settings, std::span<const int> order,
                                std::size_t perm_index, std::uint64_t master_seed,
                                CenterMethod center, WeightedDenominator denom,
                                const TraceSink* trace) {
  std::vector<Pose> poses;
  std::vector<DetectionSet> dets;
  for (const int idx : order) {
    const Pose& pose = scenario.schedule.poses[idx];
    DetectionSet d = simulate_detections(scenario.scene, pose, scenario.camera);
    d.viewpoint_index = idx;
    if (settings.noise) {
      NoiseModel noise = *settings.noise;
      noise.rng_seed = derive_seed(master_seed, perm_index, static_cast<std::uint64_t>(idx));
      d = apply_noise(d, noise, scenario.camera);
    }
    poses.push_back(pose);
    dets.push_back(std::move(d));
  }

  const ProbabilityGrid posterior =
      run_filter(grid, poses, dets, scenario.camera, settings.kernel, nullptr, trace);
  const int k = object_count(dets);
  const auto points = extract_points(posterior, settings.threshold);
  const ClusterResult clusters =
      kmeans(points, k, derive_seed(master_seed, perm_index, kKmeansStream), denom);

  std::vector<Vec3> centers;
  centers.reserve(clusters.clusters.size());
  for (const Cluster& c : clusters.clusters)
    centers.push_back(center == CenterMethod::Weighted ? c.weighted_center
                                                       : c.geometric_center);
  return centers;
}

SimulateOutcome cmd_simulate(const RunConfig& config) {
  const PreparedRun run = prepare(config);
  if (run.scenario.scene.objects.empty())
    throw ConfigError("simulate needs at least one object in the scenario");
  return run_pipeline(config, run, {});
}

SimulateOutcome cmd_replay(const RunConfig& config) {
  const PreparedRun run = prepare(config);
  std::vector<DetectionSet> dets = load_detections(config.detections_path);
  const std::size_t n_vp = run.scenario.schedule.poses.size();
  if (dets.size() != n_vp)
    throw ValidationError("detections cover " + std::to_string(dets.size()) +
                          " viewpoint(s) but the scenario has " + std::to_string(n_vp));
  std::sort(dets.begin(), dets.end(), [](const DetectionSet& a, const DetectionSet& b) {
    return a.viewpoint_index < b.viewpoint_index;
  });
  for (std::size_t i = 0; i < dets.size(); ++i)
    if (dets[i].viewpoint_index != static_cast<int>(i))
      throw ValidationError("detections must cover viewpoint indices 0.." +
                            std::to_string(n_vp - 1) + " exactly once");
  if (config.noise_center_sigma || config.noise_size_sigma || config.noise_dropout)
    log_warn("noise flags are ignored for replayed detections");
  return run_pipeline(config, run, {dets});
}

BenchResult cmd_bench(const RunConfig& config) {
  const PreparedRun run = prepare(config);
  if (run.scenario.scene.objects.empty())
    throw ConfigError("bench needs at least one object in the scenario");
  const BenchResult result =
      run_bench(run.scenario, run.settings.kernel, config.bench_worker_counts,
                config.bench_repetitions, run.settings.resolution_m, config.seed);
  std::filesystem::create_directories(config.out_dir);
  write_bench_csv(result, config.out_dir / "bench.csv");
  for (std::size_t i = 0; i < result.worker_counts.size(); ++i)
    std::cout << "workers=" << result.worker_counts[i]
              << " median_update_s=" << format_double(result.median_wall_s[i]) << "\n";
  std::cout << "fit: sigma_s=" << format_double(result.sequential_s)
            << " phi_s=" << format_double(result.parallel_s)
            << " max_speedup=" << format_double(result.max_speedup) << "\n";
  return result;
}

void cmd_validate(const RunConfig& config) {
  const Scenario scenario = load_scene(config.scenario_path);
  std::cout << "scenario ok: " << scenario.scene.objects.size() << " object(s), "
            << scenario.schedule.poses.size() << " viewpoint(s)\n";
  if (!config.detections_path.empty()) {
    const auto dets = load_detections(config.detections_path);
    for (const DetectionSet& d : dets)
      if (d.viewpoint_index >= static_cast<int>(scenario.schedule.poses.size()))
        throw ValidationError("detections reference viewpoint " +
                              std::to_string(d.viewpoint_index) +
                              " but the scenario has only " +
                              std::to_string(scenario.schedule.poses.size()));
    std::cout << "detections ok: " << dets.size() << " viewpoint set(s)\n";
  }
}

}  // namespace mono3d
