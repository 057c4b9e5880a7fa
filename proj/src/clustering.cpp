#include "mono3d/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "mono3d/errors.hpp"

namespace mono3d {

std::vector<WeightedPoint> extract_points(const ProbabilityGrid& state, double threshold) {
  if (!(threshold >= 0.0 && threshold < 1.0))
    throw InvalidInput("extraction threshold must be in [0, 1)");
  std::vector<WeightedPoint> points;
  for (std::size_t i = 0; i < state.weights.size(); ++i)
    if (state.weights[i] > threshold)
      points.push_back({state.grid.cell_center(i), state.weights[i]});
  if (points.empty())
    throw NoSurvivors("no cell above threshold " + std::to_string(threshold));
  return points;
}

Vec3 weighted_center(std::span<const WeightedPoint> members, WeightedDenominator denom) {
  if (members.empty()) throw EmptyCluster("weighted_center: empty cluster");
  if (denom == WeightedDenominator::MemberCount) {
    Vec3 acc{0, 0, 0};
    for (const WeightedPoint& p : members) acc = acc + p.position * p.weight;
    return acc * (1.0 / static_cast<double>(members.size()));
  }
  double weight_sum = 0.0;
  for (const WeightedPoint& p : members) weight_sum += p.weight;
  if (weight_sum <= 0.0) throw ZeroWeightSum("weighted_center: weights sum to zero");
  // Accumulating normalized weights keeps a lone member's centre exact.
  Vec3 acc{0, 0, 0};
  for (const WeightedPoint& p : members) acc = acc + p.position * (p.weight / weight_sum);
  return acc;
}

namespace {

double dist2(const Vec3& a, const Vec3& b) {
  const Vec3 d = a - b;
  return dot(d, d);
}

struct LloydRun {
  std::vector<Vec3> centers;
  std::vector<int> assignment;
  double inertia = 0.0;
};

// Farthest-point seeding: random first pick, then repeatedly the point
// farthest from its nearest chosen centre (ties to the lowest index).
std::vector<Vec3> seed_centers(std::span<const WeightedPoint> points, int k,
                               std::mt19937_64& rng) {
  const std::size_t n = points.size();
  std::vector<bool> chosen(n, false);
  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
  std::vector<Vec3> centers;
  std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  chosen[first] = true;
  centers.push_back(points[first].position);
  while (static_cast<int>(centers.size()) < k) {
    std::size_t best = n;
    double best_d2 = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      min_d2[i] = std::min(min_d2[i], dist2(points[i].position, centers.back()));
      if (min_d2[i] > best_d2) {
        best_d2 = min_d2[i];
        best = i;
      }
    }
    chosen[best] = true;
    centers.push_back(points[best].position);
  }
  return centers;
}

LloydRun lloyd(std::span<const WeightedPoint> points, int k, std::mt19937_64& rng) {
  constexpr int kMaxIterations = 300;
  constexpr double kMoveTol = 1e-9;

  const std::size_t n = points.size();
  LloydRun run;
  run.centers = seed_centers(points, k, rng);
  run.assignment.assign(n, 0);

  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    // Assign to the nearest centre; ties go to the lower cluster index.
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d2 = dist2(points[i].position, run.centers[0]);
      for (int c = 1; c < k; ++c) {
        const double d2 = dist2(points[i].position, run.centers[c]);
        if (d2 < best_d2) {
          best_d2 = d2;
          best = c;
        }
      }
      run.assignment[i] = best;
      inertia += best_d2;
    }
    if (inertia > prev_inertia * (1.0 + 1e-12) + 1e-15)
      throw std::logic_error("k-means inertia increased across an iteration");
    prev_inertia = inertia;
    run.inertia = inertia;

    std::vector<Vec3> sums(k, Vec3{0, 0, 0});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[run.assignment[i]] = sums[run.assignment[i]] + points[i].position;
      ++counts[run.assignment[i]];
    }

    double max_move = 0.0;
    for (int c = 0; c < k; ++c) {
      Vec3 next;
      if (counts[c] > 0) {
        next = sums[c] * (1.0 / static_cast<double>(counts[c]));
      } else {
        // Re-seed an emptied cluster at the point farthest from its centre.
        std::size_t best = 0;
        double best_d2 = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d2 = dist2(points[i].position, run.centers[run.assignment[i]]);
          if (d2 > best_d2) {
            best_d2 = d2;
            best = i;
          }
        }
        next = points[best].position;
        prev_inertia = std::numeric_limits<double>::infinity();
      }
      max_move = std::max(max_move, std::sqrt(dist2(next, run.centers[c])));
      run.centers[c] = next;
    }
    if (max_move < kMoveTol) break;
  }

  // Final assignment/inertia for the converged centres. A cluster can only
  // come out empty under exact duplicate centres; repair by re-seeding at the
  // worst-assigned point, which terminates within k rounds.
  for (int round = 0; round <= k; ++round) {
    run.inertia = 0.0;
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d2 = dist2(points[i].position, run.centers[0]);
      for (int c = 1; c < k; ++c) {
        const double d2 = dist2(points[i].position, run.centers[c]);
        if (d2 < best_d2) {
          best_d2 = d2;
          best = c;
        }
      }
      run.assignment[i] = best;
      run.inertia += best_d2;
      ++counts[best];
    }
    const auto empty = std::find(counts.begin(), counts.end(), std::size_t{0});
    if (empty == counts.end()) return run;
    std::size_t farthest = 0;
    double far_d2 = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d2 = dist2(points[i].position, run.centers[run.assignment[i]]);
      if (d2 > far_d2) {
        far_d2 = d2;
        farthest = i;
      }
    }
    run.centers[static_cast<int>(empty - counts.begin())] = points[farthest].position;
  }
  throw std::logic_error("k-means could not populate every cluster");
}

}  // namespace

ClusterResult kmeans(std::span<const WeightedPoint> points, int k, std::uint64_t seed,
                     WeightedDenominator denom) {
  constexpr int kRestarts = 10;
  if (k < 1) throw InvalidInput("kmeans: k must be >= 1");
  if (points.size() < static_cast<std::size_t>(k))
    throw TooFewPoints("kmeans: " + std::to_string(points.size()) + " point(s) for k=" +
                       std::to_string(k));

  LloydRun best;
  bool have_best = false;
  for (int r = 0; r < kRestarts; ++r) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(r));
    LloydRun run = lloyd(points, k, rng);
    if (!have_best || run.inertia < best.inertia) {
      best = std::move(run);
      have_best = true;
    }
  }

  ClusterResult result;
  result.inertia = best.inertia;
  result.clusters.resize(k);
  for (int c = 0; c < k; ++c) result.clusters[c].geometric_center = best.centers[c];
  for (std::size_t i = 0; i < points.size(); ++i)
    result.clusters[best.assignment[i]].members.push_back(points[i]);
  for (Cluster& c : result.clusters)
    c.weighted_center = weighted_center(c.members, denom);

  std::sort(result.clusters.begin(), result.clusters.end(),
            [](const Cluster& a, const Cluster& b) {
              const Vec3& ga = a.geometric_center;
              const Vec3& gb = b.geometric_center;
              if (ga.x != gb.x) return ga.x < gb.x;
              if (ga.y != gb.y) return ga.y < gb.y;
              return ga.z < gb.z;
            });
  return result;
}

int object_count(std::span<const DetectionSet> dets) {
  int best = 0;
  for (const DetectionSet& d : dets) best = std::max(best, static_cast<int>(d.boxes.size()));
  if (best == 0) throw NoDetections("no viewpoint produced any detection");
  return best;
}

}  // namespace mono3d
