#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mono3d/geometry.hpp"

namespace mono3d {

struct Scene;

// Axis-aligned box in continuous pixel coordinates, centre + full size.
struct BoundingBox {
  double cx = 0.0;
  double cy = 0.0;
  double bw = 0.0;
  double bh = 0.0;
  std::string label;
  double confidence = 1.0;

  bool operator==(const BoundingBox&) const = default;
};

// Boxes observed from one viewpoint. viewpoint_index addresses a pose in
// the schedule, which stays valid even when the fold order is permuted.
struct DetectionSet {
  int viewpoint_index = 0;
  std::vector<BoundingBox> boxes;

  bool operator==(const DetectionSet&) const = default;
};

// Sigmas are fractions of the box dimensions: centre shift N(0, sigma*size),
// size jitter multiplicative (1 + N(0, sigma)).
struct NoiseModel {
  double center_sigma = 0.0;
  double size_sigma = 0.0;
  double dropout_prob = 0.0;
  std::uint64_t rng_seed = 0;

  bool operator==(const NoiseModel&) const = default;
};

// Ideal bounding-box camera over the scene: each object in front of the
// sensor projects to a box centred on its projected centre with half-extent
// f*r/z, clipped to the image. Objects behind the camera or projecting
// fully outside are omitted. Confidence is 1, label is the object id.
DetectionSet simulate_detections(const Scene& scene, const Pose& pose, const CameraModel& cam);

// Perturbs a detection set: drops each box with dropout_prob, shifts the
// survivors' centres by N(0, center_sigma * box size), scales sizes by
// (1 + N(0, size_sigma)), re-clips to the image and floors sizes at 1 px.
// Deterministic for a given rng_seed.
DetectionSet apply_noise(const DetectionSet& dets, const NoiseModel& noise,
                         const CameraModel& cam);

std::vector<DetectionSet> load_detections(const std::filesystem::path& path);
void save_detections(std::span<const DetectionSet> dets, const std::filesystem::path& path);
std::string detections_to_json(std::span<const DetectionSet> dets);

}  // namespace mono3d
