#include "mono3d/filter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mono3d/csv.hpp"
#include "mono3d/errors.hpp"
#include "mono3d/log.hpp"
#include "mono3d/worker_pool.hpp"

namespace mono3d {

GridDecomposition decompose(const Pose& first_pose, double reach_m, double resolution_m) {
  if (!(reach_m > 0)) throw InvalidInput("reach must be > 0");
  if (!(resolution_m > 0) || resolution_m > reach_m)
    throw InvalidResolution("resolution must satisfy 0 < resolution <= reach, got " +
                            std::to_string(resolution_m));
  const int n = std::max<int>(1, static_cast<int>(std::llround(2.0 * reach_m / resolution_m)));
  // Volume centre: camera origin pushed forward (camera +x) by the reach.
  const Vec3 forward_world = rotate(first_pose.rotation, Vec3{1.0, 0.0, 0.0});
  const Vec3 center = first_pose.translation + forward_world * reach_m;
  const double half = 0.5 * n * resolution_m;

  GridDecomposition grid;
  grid.origin = center - Vec3{half, half, half};
  grid.resolution = resolution_m;
  grid.nx = n;
  grid.ny = n;
  grid.nz = n;
  return grid;
}

ProbabilityGrid make_uniform_state(const GridDecomposition& grid) {
  ProbabilityGrid state;
  state.grid = grid;
  state.weights.assign(grid.cell_count(), 1.0);
  return state;
}

double kernel_eval(const KernelSpec& kernel, const BoundingBox& box, double u, double v) {
  const double du = u - box.cx;
  const double dv = v - box.cy;
  if (kernel.kind == KernelKind::Square)
    return (std::abs(du) <= 0.5 * box.bw && std::abs(dv) <= 0.5 * box.bh) ? 1.0 : 0.0;
  const double sx = box.bw / kernel.sigma_divisor;
  const double sy = box.bh / kernel.sigma_divisor;
  return std::exp(-du * du / (2.0 * sx * sx) - dv * dv / (2.0 * sy * sy));
}

void compute_likelihood_field(const GridDecomposition& grid, const Pose& pose,
                              const CameraModel& cam, const DetectionSet& dets,
                              const KernelSpec& kernel, std::size_t begin, std::size_t end,
                              std::span<double> field) {
  const double box_weight = 1.0 / static_cast<double>(dets.boxes.size());
  const double w = static_cast<double>(cam.width);
  const double h = static_cast<double>(cam.height);
  for (std::size_t i = begin; i < end; ++i) {
    const Vec3 sensor = camera_to_sensor(world_to_camera(grid.cell_center(i), pose));
    double value = 0.0;
    if (const auto px = project(sensor, cam);
        px && px->u >= 0.0 && px->u < w && px->v >= 0.0 && px->v < h) {
      for (const BoundingBox& box : dets.boxes)
        value += box_weight * kernel_eval(kernel, box, px->u, px->v);
    }
    field[i] = value;
  }
}

void apply_likelihood_field(ProbabilityGrid& state, std::span<const double> field) {
  double field_max = 0.0;
  for (const double v : field) field_max = std::max(field_max, v);
  if (field_max == 0.0)
    throw DegenerateField("no cell projects into any bounding box for this viewpoint");

  double post_max = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    state.weights[i] *= field[i] / field_max;
    post_max = std::max(post_max, state.weights[i]);
  }
  if (post_max == 0.0)
    throw DegeneratePosterior(
        "posterior vanished: viewpoint evidence is disjoint from all surviving cells");
  for (double& w : state.weights) w /= post_max;
}

namespace {

void compute_field(const GridDecomposition& grid, const Pose& pose, const CameraModel& cam,
                   const DetectionSet& dets, const KernelSpec& kernel, const WorkerPool* pool,
                   std::span<double> field) {
  const std::size_t n = grid.cell_count();
  if (pool != nullptr) {
    pool->run(n, [&](std::size_t begin, std::size_t end) {
      compute_likelihood_field(grid, pose, cam, dets, kernel, begin, end, field);
    });
  } else {
    compute_likelihood_field(grid, pose, cam, dets, kernel, 0, n, field);
  }
}

}  // namespace

ProbabilityGrid viewpoint_update(const ProbabilityGrid& state, const Pose& pose,
                                 const CameraModel& cam, const DetectionSet& dets,
                                 const KernelSpec& kernel, const WorkerPool* pool) {
  if (dets.boxes.empty())
    throw EmptyDetections("viewpoint " + std::to_string(dets.viewpoint_index) +
                          " has no detections");
  ProbabilityGrid next = state;
  std::vector<double> field(state.grid.cell_count());
  compute_field(state.grid, pose, cam, dets, kernel, pool, field);
  apply_likelihood_field(next, field);
  return next;
}

ProbabilityGrid run_filter(const GridDecomposition& grid, std::span<const Pose> poses,
                           std::span<const DetectionSet> dets, const CameraModel& cam,
                           const KernelSpec& kernel, const WorkerPool* pool,
                           const TraceSink* trace) {
  if (poses.size() != dets.size())
    throw InvalidInput("run_filter: poses and detection sets must pair up");

  ProbabilityGrid state = make_uniform_state(grid);
  std::vector<double> field(grid.cell_count());
  std::size_t applied = 0;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    if (dets[i].boxes.empty()) {
      log_warn("skipping viewpoint " + std::to_string(dets[i].viewpoint_index) +
               ": no detections");
      continue;
    }
    compute_field(grid, poses[i], cam, dets[i], kernel, pool, field);
    try {
      apply_likelihood_field(state, field);
    } catch (const DegenerateField&) {
      log_warn("skipping viewpoint " + std::to_string(dets[i].viewpoint_index) +
               ": likelihood field is zero everywhere");
      continue;
    }
    ++applied;
    if (trace != nullptr && *trace) (*trace)(applied - 1, dets[i].viewpoint_index, state);
  }
  if (applied < 2)
    throw InsufficientViewpoints("only " + std::to_string(applied) +
                                 " viewpoint update(s) applied; need at least 2");
  return state;
}

void write_trace_csv(const ProbabilityGrid& state, double threshold,
                     const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "x_m,y_m,z_m,weight\n";
  for (std::size_t i = 0; i < state.weights.size(); ++i) {
    if (state.weights[i] > threshold) {
      const Vec3 c = state.grid.cell_center(i);
      out << format_double(c.x) << ',' << format_double(c.y) << ',' << format_double(c.z)
          << ',' << format_double(state.weights[i]) << '\n';
    }
  }
}

}  // namespace mono3d
