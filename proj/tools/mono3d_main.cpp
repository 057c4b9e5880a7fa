#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mono3d/errors.hpp"
#include "mono3d/log.hpp"
#include "mono3d/pipeline.hpp"

namespace {

struct CliOptions {
  mono3d::RunConfig config;
  std::string kernel;
  std::string center = "weighted";
  std::string weighted_denom = "wsum";
  unsigned max_workers = 8;
  bool no_permute = false;
};

void add_common_options(CLI::App* sub, CliOptions& opts, bool with_noise) {
  sub->add_option("--scenario", opts.config.scenario_path, "Scenario file (JSON)")
      ->required();
  sub->add_option("--kernel", opts.kernel, "Likelihood kernel")
      ->check(CLI::IsMember({"square", "gaussian"}));
  sub->add_option("--sigma-divisor", opts.config.sigma_divisor,
                  "Gaussian sigma = box size / divisor (default 2)");
  sub->add_option("--resolution", opts.config.resolution_m,
                  "Grid resolution in metres (default 0.01)");
  sub->add_option("--threshold", opts.config.threshold,
                  "Extraction threshold in [0,1) (default 0.5)");
  sub->add_option("--center", opts.center, "Cluster centre estimate")
      ->check(CLI::IsMember({"geometric", "weighted"}));
  sub->add_option("--weighted-denom", opts.weighted_denom,
                  "Weighted-centre denominator: weight sum or member count")
      ->check(CLI::IsMember({"wsum", "count"}));
  sub->add_option("--seed", opts.config.seed, "Master random seed (default 0)");
  sub->add_option("--out", opts.config.out_dir, "Output directory (default .)");
  if (with_noise) {
    sub->add_option("--noise-center-sigma", opts.config.noise_center_sigma,
                    "Centre jitter sigma, fraction of image dimension");
    sub->add_option("--noise-size-sigma", opts.config.noise_size_sigma,
                    "Size jitter sigma, fraction of box size");
    sub->add_option("--dropout", opts.config.noise_dropout,
                    "Per-box detection failure probability");
  }
}

void finalize(CliOptions& opts) {
  if (!opts.kernel.empty())
    opts.config.kernel = opts.kernel == "square" ? mono3d::KernelKind::Square
                                                 : mono3d::KernelKind::Gaussian;
  opts.config.center = opts.center == "geometric" ? mono3d::CenterMethod::Geometric
                                                  : mono3d::CenterMethod::Weighted;
  opts.config.weighted_denom = opts.weighted_denom == "count"
                                   ? mono3d::WeightedDenominator::MemberCount
                                   : mono3d::WeightedDenominator::WeightSum;
  opts.config.permute = !opts.no_permute;

  opts.config.bench_worker_counts.clear();
  for (unsigned p = 1; p < opts.max_workers; p *= 2)
    opts.config.bench_worker_counts.push_back(p);
  opts.config.bench_worker_counts.push_back(opts.max_workers);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view 3D position estimation from 2D bounding-box detections"};
  app.require_subcommand(1);

  CliOptions opts;

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Simulate detections over a scenario and estimate object centres");
  add_common_options(simulate, opts, true);
  simulate->add_flag("--no-permute", opts.no_permute,
                     "Run the scheduled viewpoint order only");
  simulate->add_flag("--trace", opts.config.trace,
                     "Export per-viewpoint point clouds (first permutation)");

  CLI::App* replay = app.add_subcommand("replay", "Estimate from recorded detections");
  add_common_options(replay, opts, false);
  replay->add_option("--detections", opts.config.detections_path, "Detections file (JSON)")
      ->required();
  replay->add_flag("--trace", opts.config.trace,
                   "Export per-viewpoint point clouds");

  CLI::App* bench = app.add_subcommand("bench", "Time the filter across worker counts");
  add_common_options(bench, opts, true);
  bench->add_option("--workers", opts.max_workers,
                    "Highest worker count; sweeps powers of two up to it (default 8)");
  bench->add_option("--repetitions", opts.config.bench_repetitions,
                    "Timed passes per worker count (default 5, minimum 3)");

  CLI::App* validate =
      app.add_subcommand("validate", "Check scenario/detection files without running");
  validate->add_option("--scenario", opts.config.scenario_path, "Scenario file (JSON)")
      ->required();
  validate->add_option("--detections", opts.config.detections_path,
                       "Optional detections file to check against the scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  finalize(opts);

  try {
    if (simulate->parsed()) {
      mono3d::cmd_simulate(opts.config);
    } else if (replay->parsed()) {
      mono3d::cmd_replay(opts.config);
    } else if (bench->parsed()) {
      mono3d::cmd_bench(opts.config);
    } else if (validate->parsed()) {
      mono3d::cmd_validate(opts.config);
    }
  } catch (const mono3d::ConfigError& e) {
    mono3d::log_error(e.what());
    return 2;
  } catch (const mono3d::AlgorithmError& e) {
    mono3d::log_error(e.what());
    return 1;
  } catch (const std::exception& e) {
    mono3d::log_error(std::string("unexpected: ") + e.what());
    return 1;
  }
  return 0;
}
