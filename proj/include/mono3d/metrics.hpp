#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mono3d/geometry.hpp"
#include "mono3d/scene.hpp"

namespace mono3d {

struct MatchedPair {
  std::string object_id;
  Vec3 truth;     // metres
  Vec3 estimate;  // metres
};

// Minimum-total-Euclidean-distance assignment of estimates to ground-truth
// objects, by exhaustive permutation (counts here never exceed 10).
// Throws CountMismatch when list sizes differ.
std::vector<MatchedPair> match_estimates(std::span<const SceneObject> truths,
                                         std::span<const Vec3> estimates);

struct AxisErrors {
  double mae = 0.0;   // m
  double mse = 0.0;   // m^2
  double rmse = 0.0;  // m
};

struct ObjectErrors {
  std::string object_id;
  Vec3 truth;
  Vec3 mean_estimate;   // averaged over this object's measures
  Vec3 mean_abs_error;  // per axis
  int measures = 0;
};

struct ErrorReport {
  double mae = 0.0;             // m, over all scalar components
  double mse = 0.0;             // m^2
  double rmse = 0.0;            // m
  double mape = 0.0;            // percent; near-zero truth components excluded
  double mean_euclidean = 0.0;  // m, per matched pair
  std::array<AxisErrors, 3> per_axis;
  std::vector<ObjectErrors> per_object;  // sorted by object_id
  int component_count = 0;
  int mape_excluded = 0;  // components skipped by the near-zero guard
};

// Scalar metrics over every component of every pair. MAPE skips components
// with |truth| < 1e-6 m (the division blows up there) and reports how many
// were skipped. Throws EmptyInput for an empty pair list.
ErrorReport compute_errors(std::span<const MatchedPair> pairs);

// CSV: metric,value,unit
void write_metrics_csv(const ErrorReport& report, const std::filesystem::path& path);
// CSV: object_id,axis,truth_m,estimate_m,abs_error_m
void write_per_object_csv(const ErrorReport& report, const std::filesystem::path& path);

}  // namespace mono3d
