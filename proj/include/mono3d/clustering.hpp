#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mono3d/detection.hpp"
#include "mono3d/filter.hpp"
#include "mono3d/geometry.hpp"

namespace mono3d {

struct WeightedPoint {
  Vec3 position;  // metres, world frame
  double weight = 0.0;

  bool operator==(const WeightedPoint&) const = default;
};

// World-frame centres of all cells with weight above threshold.
// Throws NoSurvivors when nothing clears it (the filter failed upstream).
std::vector<WeightedPoint> extract_points(const ProbabilityGrid& state, double threshold);

// The printed form of the weighted average uses the member count as the
// denominator, which shrinks sub-unit-weight centres toward the origin;
// WeightSum is the consistent reading and the default. MemberCount is kept
// selectable for comparison.
enum class WeightedDenominator { WeightSum, MemberCount };

Vec3 weighted_center(std::span<const WeightedPoint> members,
                     WeightedDenominator denom = WeightedDenominator::WeightSum);

struct Cluster {
  std::vector<WeightedPoint> members;
  Vec3 geometric_center;  // the converged k-means centroid
  Vec3 weighted_center;
};

struct ClusterResult {
  std::vector<Cluster> clusters;  // sorted by geometric centre (x, y, z)
  double inertia = 0.0;           // sum of squared member-to-centre distances, m^2
};

// Lloyd iterations with farthest-point seeding, 10 restarts (per-restart
// seeds derived as seed + restart), keeping the lowest inertia. Converges
// when no centre moves more than 1e-9 m, capped at 300 iterations.
// Deterministic for a fixed seed. Throws TooFewPoints when points < k.
ClusterResult kmeans(std::span<const WeightedPoint> points, int k, std::uint64_t seed,
                     WeightedDenominator denom = WeightedDenominator::WeightSum);

// Number of objects in the scene, read off the detections: the maximum box
// count over viewpoints (dropout only ever removes boxes).
int object_count(std::span<const DetectionSet> dets);

}  // namespace mono3d
