#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "mono3d/detection.hpp"
#include "mono3d/geometry.hpp"

namespace mono3d {

class WorkerPool;

enum class KernelKind { Square, Gaussian };

struct KernelSpec {
  KernelKind kind = KernelKind::Square;
  // Gaussian only: sigma_x = bw / sigma_divisor, sigma_y = bh / sigma_divisor.
  double sigma_divisor = 2.0;
};

// Static axis-aligned decomposition of the search volume into uniform cells.
// Cell (ix, iy, iz) is flattened as ix + nx*(iy + ny*iz); its representative
// point is the cell centre.
struct GridDecomposition {
  Vec3 origin;             // min corner, world frame, metres
  double resolution = 0.0; // metres per cell
  int nx = 0;
  int ny = 0;
  int nz = 0;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }

  Vec3 cell_center(std::size_t idx) const {
    const std::size_t sx = static_cast<std::size_t>(nx);
    const std::size_t sxy = sx * static_cast<std::size_t>(ny);
    const double ix = static_cast<double>(idx % sx);
    const double iy = static_cast<double>((idx / sx) % static_cast<std::size_t>(ny));
    const double iz = static_cast<double>(idx / sxy);
    return {origin.x + (ix + 0.5) * resolution,
            origin.y + (iy + 0.5) * resolution,
            origin.z + (iz + 0.5) * resolution};
  }

  bool operator==(const GridDecomposition&) const = default;
};

// Cube of side 2*reach centred on the first camera's origin displaced by
// reach along that camera's forward axis. Throws InvalidResolution unless
// 0 < resolution <= reach.
GridDecomposition decompose(const Pose& first_pose, double reach_m, double resolution_m);

// Filter state: one weight per cell, each in [0, 1]. After an applied
// update the maximum weight is exactly 1.
struct ProbabilityGrid {
  GridDecomposition grid;
  std::vector<double> weights;
};

// All cells start at 1: any cell may contain an object.
ProbabilityGrid make_uniform_state(const GridDecomposition& grid);

// Per-box response at pixel (u, v), in [0, 1]. Square: 1 inside the box
// (boundary inclusive), else 0. Gaussian: unnormalized bivariate density
// centred on the box.
double kernel_eval(const KernelSpec& kernel, const BoundingBox& box, double u, double v);

// Fills field[i] for cells [begin, end): 0 when the cell centre is behind
// the camera or projects outside the image, otherwise the box-averaged
// kernel response. Each cell depends only on its own centre, so disjoint
// ranges may be computed concurrently with identical results.
void compute_likelihood_field(const GridDecomposition& grid, const Pose& pose,
                              const CameraModel& cam, const DetectionSet& dets,
                              const KernelSpec& kernel, std::size_t begin, std::size_t end,
                              std::span<double> field);

// Max-normalizes the field, multiplies it into the state, renormalizes so
// the best cell is exactly 1. Throws DegenerateField when the field is all
// zero and DegeneratePosterior when the product vanishes everywhere.
void apply_likelihood_field(ProbabilityGrid& state, std::span<const double> field);

// One observation step. Pure: the prior state is left untouched.
// Throws EmptyDetections when dets has no boxes.
ProbabilityGrid viewpoint_update(const ProbabilityGrid& state, const Pose& pose,
                                 const CameraModel& cam, const DetectionSet& dets,
                                 const KernelSpec& kernel, const WorkerPool* pool = nullptr);

// Called after each applied update with the running state.
using TraceSink =
    std::function<void(std::size_t update_index, int viewpoint_index, const ProbabilityGrid&)>;

// Folds viewpoint updates over poses/dets (parallel arrays, already in fold
// order). Viewpoints with no boxes or an all-zero field are skipped with a
// warning; throws InsufficientViewpoints when fewer than 2 updates applied.
ProbabilityGrid run_filter(const GridDecomposition& grid, std::span<const Pose> poses,
                           std::span<const DetectionSet> dets, const CameraModel& cam,
                           const KernelSpec& kernel, const WorkerPool* pool = nullptr,
                           const TraceSink* trace = nullptr);

// Point cloud of cells above threshold: header x_m,y_m,z_m,weight.
void write_trace_csv(const ProbabilityGrid& state, double threshold,
                     const std::filesystem::path& path);

}  // namespace mono3d
