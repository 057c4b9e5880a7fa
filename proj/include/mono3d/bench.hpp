#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mono3d/filter.hpp"
#include "mono3d/scene.hpp"

namespace mono3d {

struct BenchResult {
  KernelKind kernel = KernelKind::Square;
  std::vector<unsigned> worker_counts;
  std::vector<double> median_wall_s;  // per viewpoint update, one per worker count
  double sequential_s = 0.0;          // fitted constant part of t(p) = s + q/p
  double parallel_s = 0.0;            // fitted 1/p part
  double max_speedup = 0.0;           // (s+q)/s, infinite when s <= 0
};

// Upper bound on speedup with p processors given sequential and
// parallelizable work: (sigma + phi) / (sigma + phi/p).
// Throws InvalidInput unless sigma,phi >= 0, sigma+phi > 0, p >= 1.
double amdahl_bound(double sigma_s, double phi_s, unsigned p);

struct AmdahlFit {
  double sigma_s = 0.0;
  double phi_s = 0.0;
};

// Least squares of t(p) = sigma + phi/p over measured (workers, seconds).
AmdahlFit fit_amdahl(std::span<const unsigned> workers, std::span<const double> seconds);

// Times the filter over the scenario for each worker count (repetitions full
// passes, median over all per-viewpoint updates) and fits the curve above.
// The posterior must be bitwise identical for every worker count; any
// difference throws NondeterministicOutput.
BenchResult run_bench(const Scenario& scenario, const KernelSpec& kernel,
                      std::span<const unsigned> worker_counts, int repetitions,
                      double resolution_m, std::uint64_t seed);

// CSV: kernel,workers,median_wall_s,speedup + trailing fitted-parameters line.
void write_bench_csv(const BenchResult& result, const std::filesystem::path& path);

}  // namespace mono3d
