#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "mono3d/bench.hpp"
#include "mono3d/clustering.hpp"
#include "mono3d/metrics.hpp"
#include "mono3d/scene.hpp"

namespace mono3d {

enum class CenterMethod { Geometric, Weighted };

// One experiment invocation. Optional fields fall back to the scenario's
// filter block, then to built-in defaults (kernel gaussian, divisor 2,
// resolution 0.01 m, threshold 0.5).
struct RunConfig {
  std::filesystem::path scenario_path;
  std::filesystem::path detections_path;  // replay only
  std::optional<KernelKind> kernel;
  std::optional<double> sigma_divisor;
  std::optional<double> resolution_m;
  std::optional<double> threshold;
  CenterMethod center = CenterMethod::Weighted;
  WeightedDenominator weighted_denom = WeightedDenominator::WeightSum;
  std::optional<double> noise_center_sigma;
  std::optional<double> noise_size_sigma;
  std::optional<double> noise_dropout;
  std::uint64_t seed = 0;
  bool permute = true;
  bool trace = false;
  std::filesystem::path out_dir = ".";
  std::vector<unsigned> bench_worker_counts{1, 2, 4, 8};
  int bench_repetitions = 5;
};

struct ResolvedSettings {
  KernelSpec kernel;
  double resolution_m = 0.01;
  double threshold = 0.5;
  std::optional<NoiseModel> noise;  // empty when the run is noiseless
};

ResolvedSettings resolve_settings(const RunConfig& config, const Scenario& scenario);

// Stable seed stream for (master, permutation, viewpoint) triples, so each
// permutation perturbs its detections independently but reproducibly.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t permutation,
                          std::uint64_t stream);

// Simulates (or takes prepared) detections for the given viewpoint order,
// runs the filter, clusters, and returns one centre per detected object.
std::vector<Vec3> estimate_once(const Scenario& scenario, const GridDecomposition& grid,
                                const ResolvedSettings& settings, std::span<const int> order,
                                std::size_t perm_index, std::uint64_t master_seed,
                                CenterMethod center, WeightedDenominator denom,
                                const TraceSink* trace = nullptr);

struct SimulateOutcome {
  bool has_report = false;
  ErrorReport report;  // valid when has_report
  int permutations_run = 0;
  int permutations_failed = 0;
};

// Full experiment: one filter+cluster pass per viewpoint permutation (or a
// single ordered pass with permute=false), matched against ground truth.
// Writes estimates.csv, metrics.csv, per_object.csv and optional trace
// clouds under out_dir. Permutations that fail for algorithmic reasons are
// logged and skipped; the run errors only when every permutation fails.
SimulateOutcome cmd_simulate(const RunConfig& config);

// Same pipeline over detections replayed from file (one ordered pass; replay
// has no noise to resample, so permutations would repeat the same result).
// Metrics are skipped when the scenario carries no objects.
SimulateOutcome cmd_replay(const RunConfig& config);

BenchResult cmd_bench(const RunConfig& config);

// Parses and validates the scenario (and detection file when given) without
// running anything.
void cmd_validate(const RunConfig& config);

}  // namespace mono3d
