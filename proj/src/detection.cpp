#include "mono3d/detection.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mono3d/errors.hpp"
#include "mono3d/scene.hpp"

namespace mono3d {

namespace {

using nlohmann::json;

// Intersects the box with the image rectangle [0,w]x[0,h]. Empty optional
// when nothing overlaps.
std::optional<BoundingBox> clip_to_image(BoundingBox box, const CameraModel& cam) {
  const double lo_u = std::max(box.cx - 0.5 * box.bw, 0.0);
  const double hi_u = std::min(box.cx + 0.5 * box.bw, static_cast<double>(cam.width));
  const double lo_v = std::max(box.cy - 0.5 * box.bh, 0.0);
  const double hi_v = std::min(box.cy + 0.5 * box.bh, static_cast<double>(cam.height));
  if (hi_u <= lo_u || hi_v <= lo_v) return std::nullopt;
  box.cx = 0.5 * (lo_u + hi_u);
  box.cy = 0.5 * (lo_v + hi_v);
  box.bw = hi_u - lo_u;
  box.bh = hi_v - lo_v;
  return box;
}

// 53-bit uniform in [0,1); the +1 variant is in (0,1] for the log below.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform01_open0(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// Box-Muller without pair caching, so every call consumes exactly two
// engine draws and sequences stay reproducible.
double standard_normal(std::mt19937_64& rng) {
  const double u1 = uniform01_open0(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

DetectionSet simulate_detections(const Scene& scene, const Pose& pose, const CameraModel& cam) {
  DetectionSet out;
  for (const SceneObject& obj : scene.objects) {
    const Vec3 sensor = camera_to_sensor(world_to_camera(obj.center, pose));
    const auto px = project(sensor, cam);
    if (!px) continue;  // behind the camera
    const double half_extent = cam.focal * obj.radius / sensor.z;
    BoundingBox box;
    box.cx = px->u;
    box.cy = px->v;
    box.bw = 2.0 * half_extent;
    box.bh = 2.0 * half_extent;
    box.label = obj.id;
    box.confidence = 1.0;
    if (auto clipped = clip_to_image(box, cam)) out.boxes.push_back(std::move(*clipped));
  }
  return out;
}

DetectionSet apply_noise(const DetectionSet& dets, const NoiseModel& noise,
                         const CameraModel& cam) {
  if (noise.center_sigma < 0 || noise.size_sigma < 0)
    throw InvalidInput("noise sigmas must be >= 0");
  if (noise.dropout_prob < 0 || noise.dropout_prob > 1)
    throw InvalidInput("dropout_prob must be in [0, 1]");

  std::mt19937_64 rng(noise.rng_seed);
  DetectionSet out;
  out.viewpoint_index = dets.viewpoint_index;
  // Fixed draw order per box: dropout uniform, then (if kept) four normals
  // for centre x/y and size w/h. The jitter scales with the box itself: a
  // detector's localization error tracks the apparent object size, and
  // image-sized shifts would bury the signal entirely.
  for (const BoundingBox& box : dets.boxes) {
    if (uniform01(rng) < noise.dropout_prob) continue;
    BoundingBox b = box;
    b.cx += standard_normal(rng) * noise.center_sigma * b.bw;
    b.cy += standard_normal(rng) * noise.center_sigma * b.bh;
    b.bw *= 1.0 + standard_normal(rng) * noise.size_sigma;
    b.bh *= 1.0 + standard_normal(rng) * noise.size_sigma;
    b.bw = std::max(b.bw, 1.0);
    b.bh = std::max(b.bh, 1.0);
    auto clipped = clip_to_image(b, cam);
    if (!clipped) continue;  // jittered fully out of frame
    clipped->bw = std::max(clipped->bw, 1.0);
    clipped->bh = std::max(clipped->bh, 1.0);
    out.boxes.push_back(std::move(*clipped));
  }
  return out;
}

std::vector<DetectionSet> load_detections(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("detections file not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();

  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("detections: ") + e.what());
  }
  if (!j.is_object() || !j.contains("detections") || !j["detections"].is_array())
    throw ValidationError("detections file must be an object with a 'detections' array");
  for (const auto& [key, value] : j.items())
    if (key != "detections") throw ValidationError("unknown key '" + key + "' in detections");

  std::vector<DetectionSet> sets;
  std::set<int> seen;
  const json& arr = j["detections"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string ctx = "detections[" + std::to_string(i) + "]";
    const json& d = arr[i];
    if (!d.is_object()) throw ValidationError(ctx + " must be an object");
    for (const auto& [key, value] : d.items())
      if (key != "viewpoint_index" && key != "boxes")
        throw ValidationError("unknown key '" + key + "' in " + ctx);
    if (!d.contains("viewpoint_index") || !d["viewpoint_index"].is_number_integer())
      throw ValidationError(ctx + ".viewpoint_index must be an integer");
    DetectionSet set;
    set.viewpoint_index = d["viewpoint_index"].get<int>();
    if (set.viewpoint_index < 0) throw ValidationError(ctx + ".viewpoint_index must be >= 0");
    if (!seen.insert(set.viewpoint_index).second)
      throw ValidationError(ctx + ".viewpoint_index duplicates " +
                            std::to_string(set.viewpoint_index));
    if (!d.contains("boxes") || !d["boxes"].is_array())
      throw ValidationError(ctx + ".boxes must be an array");
    const json& boxes = d["boxes"];
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      const std::string bctx = ctx + ".boxes[" + std::to_string(b) + "]";
      const json& jb = boxes[b];
      if (!jb.is_object()) throw ValidationError(bctx + " must be an object");
      for (const auto& [key, value] : jb.items())
        if (key != "cx" && key != "cy" && key != "bw" && key != "bh" && key != "label" &&
            key != "confidence")
          throw ValidationError("unknown key '" + key + "' in " + bctx);
      BoundingBox box;
      for (const char* k : {"cx", "cy", "bw", "bh"})
        if (!jb.contains(k) || !jb[k].is_number())
          throw ValidationError(bctx + "." + k + " must be a number");
      box.cx = jb["cx"].get<double>();
      box.cy = jb["cy"].get<double>();
      box.bw = jb["bw"].get<double>();
      box.bh = jb["bh"].get<double>();
      if (!std::isfinite(box.cx) || !std::isfinite(box.cy))
        throw ValidationError(bctx + ": centre must be finite");
      if (!(box.bw > 0) || !(box.bh > 0))
        throw ValidationError(bctx + ": bw and bh must be > 0");
      if (jb.contains("label")) {
        if (!jb["label"].is_string()) throw ValidationError(bctx + ".label must be a string");
        box.label = jb["label"].get<std::string>();
      }
      if (jb.contains("confidence")) {
        if (!jb["confidence"].is_number())
          throw ValidationError(bctx + ".confidence must be a number");
        box.confidence = jb["confidence"].get<double>();
        if (!(box.confidence >= 0 && box.confidence <= 1))
          throw ValidationError(bctx + ".confidence must be in [0, 1]");
      }
      set.boxes.push_back(std::move(box));
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

std::string detections_to_json(std::span<const DetectionSet> dets) {
  json arr = json::array();
  for (const DetectionSet& set : dets) {
    json boxes = json::array();
    for (const BoundingBox& b : set.boxes)
      boxes.push_back({{"cx", b.cx},
                       {"cy", b.cy},
                       {"bw", b.bw},
                       {"bh", b.bh},
                       {"label", b.label},
                       {"confidence", b.confidence}});
    arr.push_back({{"viewpoint_index", set.viewpoint_index}, {"boxes", boxes}});
  }
  return json{{"detections", arr}}.dump(2) + "\n";
}

void save_detections(std::span<const DetectionSet> dets, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open detections file for writing: " + path.string());
  out << detections_to_json(dets);
}

}  // namespace mono3d
