#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mono3d/detection.hpp"
#include "mono3d/filter.hpp"
#include "mono3d/geometry.hpp"

namespace mono3d {

struct SceneObject {
  std::string id;
  Vec3 center;     // metres, world frame
  double radius;   // metres

  bool operator==(const SceneObject&) const = default;
};

// Ground truth for simulation: the objects and the reachability radius that
// sets the search-volume extent.
struct Scene {
  std::vector<SceneObject> objects;
  double reach = 0.0;  // metres

  bool operator==(const Scene&) const = default;
};

struct ViewpointSchedule {
  std::vector<Pose> poses;

  bool operator==(const ViewpointSchedule&) const = default;
};

// Optional per-scenario overrides for the filter stage; command-line flags
// take precedence over these.
struct FilterOverrides {
  std::optional<double> resolution_m;
  std::optional<KernelKind> kernel;
  std::optional<double> sigma_divisor;
  std::optional<double> threshold;

  bool operator==(const FilterOverrides&) const = default;
};

struct Scenario {
  CameraModel camera;
  Scene scene;
  ViewpointSchedule schedule;
  std::optional<NoiseModel> noise;
  FilterOverrides filter;

  bool operator==(const Scenario&) const = default;
};

// True when all points lie on one 3D line within tol metres.
bool all_collinear(std::span<const Vec3> points, double tol = 1e-9);

// Parses and fully validates a scenario file. Unknown keys are rejected;
// ValidationError messages name the offending field. Emits a warning (not
// an error) when viewpoints and object centres are collinear, since that
// geometry degrades depth estimation but is still worth demonstrating.
Scenario load_scene(const std::filesystem::path& path);
Scenario scene_from_json(const std::string& text);

void save_scene(const Scenario& scenario, const std::filesystem::path& path);
std::string scene_to_json(const Scenario& scenario);

}  // namespace mono3d
