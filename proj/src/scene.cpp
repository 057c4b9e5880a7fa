#include "mono3d/scene.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mono3d/errors.hpp"
#include "mono3d/log.hpp"

namespace mono3d {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& ctx) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known) throw ValidationError("unknown key '" + key + "' in " + ctx);
  }
}

const json& require_key(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError("missing key '" + std::string(key) + "' in " + ctx);
  return *it;
}

double as_number(const json& j, const std::string& ctx) {
  if (!j.is_number()) throw ValidationError(ctx + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(ctx + " must be finite");
  return v;
}

int as_int(const json& j, const std::string& ctx) {
  if (!j.is_number_integer()) throw ValidationError(ctx + " must be an integer");
  return j.get<int>();
}

Vec3 as_vec3(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 3)
    throw ValidationError(ctx + " must be an array of 3 numbers");
  return {as_number(j[0], ctx + "[0]"), as_number(j[1], ctx + "[1]"),
          as_number(j[2], ctx + "[2]")};
}

CameraModel parse_camera(const json& j) {
  if (!j.is_object()) throw ValidationError("camera must be an object");
  reject_unknown_keys(j, {"width", "height", "hfov_deg", "cx", "cy"}, "camera");
  const int w = as_int(require_key(j, "width", "camera"), "camera.width");
  const int h = as_int(require_key(j, "height", "camera"), "camera.height");
  const double hfov = as_number(require_key(j, "hfov_deg", "camera"), "camera.hfov_deg");
  double cx = 0.5 * w;
  double cy = 0.5 * h;
  if (j.contains("cx")) cx = as_number(j["cx"], "camera.cx");
  if (j.contains("cy")) cy = as_number(j["cy"], "camera.cy");
  return make_camera(w, h, hfov, cx, cy);
}

NoiseModel parse_noise(const json& j) {
  if (!j.is_object()) throw ValidationError("noise must be an object");
  reject_unknown_keys(j, {"center_sigma", "size_sigma", "dropout_prob", "rng_seed"}, "noise");
  NoiseModel noise;
  if (j.contains("center_sigma"))
    noise.center_sigma = as_number(j["center_sigma"], "noise.center_sigma");
  if (j.contains("size_sigma")) noise.size_sigma = as_number(j["size_sigma"], "noise.size_sigma");
  if (j.contains("dropout_prob"))
    noise.dropout_prob = as_number(j["dropout_prob"], "noise.dropout_prob");
  if (j.contains("rng_seed")) {
    if (!j["rng_seed"].is_number_integer())
      throw ValidationError("noise.rng_seed must be an integer");
    noise.rng_seed = j["rng_seed"].get<std::uint64_t>();
  }
  if (noise.center_sigma < 0) throw ValidationError("noise.center_sigma must be >= 0");
  if (noise.size_sigma < 0) throw ValidationError("noise.size_sigma must be >= 0");
  if (noise.dropout_prob < 0 || noise.dropout_prob > 1)
    throw ValidationError("noise.dropout_prob must be in [0, 1]");
  return noise;
}

FilterOverrides parse_filter(const json& j) {
  if (!j.is_object()) throw ValidationError("filter must be an object");
  reject_unknown_keys(j, {"resolution_m", "kernel", "sigma_divisor", "threshold"}, "filter");
  FilterOverrides f;
  if (j.contains("resolution_m")) {
    f.resolution_m = as_number(j["resolution_m"], "filter.resolution_m");
    if (*f.resolution_m <= 0) throw ValidationError("filter.resolution_m must be > 0");
  }
  if (j.contains("kernel")) {
    const auto& k = j["kernel"];
    if (!k.is_string()) throw ValidationError("filter.kernel must be a string");
    const std::string name = k.get<std::string>();
    if (name == "square")
      f.kernel = KernelKind::Square;
    else if (name == "gaussian")
      f.kernel = KernelKind::Gaussian;
    else
      throw ValidationError("filter.kernel must be 'square' or 'gaussian'");
  }
  if (j.contains("sigma_divisor")) {
    f.sigma_divisor = as_number(j["sigma_divisor"], "filter.sigma_divisor");
    if (*f.sigma_divisor <= 0) throw ValidationError("filter.sigma_divisor must be > 0");
  }
  if (j.contains("threshold")) {
    f.threshold = as_number(j["threshold"], "filter.threshold");
    if (*f.threshold < 0 || *f.threshold >= 1)
      throw ValidationError("filter.threshold must be in [0, 1)");
  }
  return f;
}

}  // namespace

bool all_collinear(std::span<const Vec3> points, double tol) {
  if (points.size() <= 2) return true;
  // Direction from the most separated pair keeps the test stable.
  std::size_t ia = 0, ib = 1;
  double best = -1.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = norm(points[i] - points[j]);
      if (d > best) {
        best = d;
        ia = i;
        ib = j;
      }
    }
  if (best < tol) return true;  // degenerate: all coincident
  const Vec3 dir = (points[ib] - points[ia]) * (1.0 / best);
  for (const Vec3& p : points) {
    const Vec3 rel = p - points[ia];
    const Vec3 perp = rel - dir * dot(rel, dir);
    if (norm(perp) > tol) return false;
  }
  return true;
}

Scenario scene_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("scenario root must be an object");
  reject_unknown_keys(j, {"camera", "reach_m", "objects", "viewpoints", "noise", "filter"},
                      "scenario");

  Scenario s;
  s.camera = parse_camera(require_key(j, "camera", "scenario"));

  s.scene.reach = as_number(require_key(j, "reach_m", "scenario"), "reach_m");
  if (s.scene.reach <= 0) throw ValidationError("reach_m must be > 0");

  const json& objs = require_key(j, "objects", "scenario");
  if (!objs.is_array()) throw ValidationError("objects must be an array");
  std::set<std::string> seen_ids;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const std::string ctx = "objects[" + std::to_string(i) + "]";
    const json& o = objs[i];
    if (!o.is_object()) throw ValidationError(ctx + " must be an object");
    reject_unknown_keys(o, {"id", "center_m", "radius_m"}, ctx);
    SceneObject obj;
    const json& id = require_key(o, "id", ctx);
    if (!id.is_string()) throw ValidationError(ctx + ".id must be a string");
    obj.id = id.get<std::string>();
    if (!seen_ids.insert(obj.id).second)
      throw ValidationError(ctx + ".id duplicates '" + obj.id + "'");
    obj.center = as_vec3(require_key(o, "center_m", ctx), ctx + ".center_m");
    obj.radius = as_number(require_key(o, "radius_m", ctx), ctx + ".radius_m");
    if (obj.radius <= 0) throw ValidationError(ctx + ".radius_m must be > 0");
    s.scene.objects.push_back(std::move(obj));
  }

  const json& vps = require_key(j, "viewpoints", "scenario");
  if (!vps.is_array()) throw ValidationError("viewpoints must be an array");
  if (vps.size() < 2)
    throw ValidationError("viewpoints: need at least 2 poses, got " +
                          std::to_string(vps.size()));
  for (std::size_t i = 0; i < vps.size(); ++i) {
    const std::string ctx = "viewpoints[" + std::to_string(i) + "]";
    const json& v = vps[i];
    if (!v.is_object()) throw ValidationError(ctx + " must be an object");
    reject_unknown_keys(v, {"translation_m", "quaternion_xyzw"}, ctx);
    Pose pose;
    pose.translation = as_vec3(require_key(v, "translation_m", ctx), ctx + ".translation_m");
    const json& q = require_key(v, "quaternion_xyzw", ctx);
    if (!q.is_array() || q.size() != 4)
      throw ValidationError(ctx + ".quaternion_xyzw must be an array of 4 numbers");
    Quaternion quat{as_number(q[0], ctx + ".quaternion_xyzw[0]"),
                    as_number(q[1], ctx + ".quaternion_xyzw[1]"),
                    as_number(q[2], ctx + ".quaternion_xyzw[2]"),
                    as_number(q[3], ctx + ".quaternion_xyzw[3]")};
    try {
      pose.rotation = normalized(quat);
    } catch (const ValidationError&) {
      throw ValidationError(ctx + ".quaternion_xyzw: zero or non-finite norm");
    }
    s.schedule.poses.push_back(pose);
  }

  if (j.contains("noise")) s.noise = parse_noise(j["noise"]);
  if (j.contains("filter")) s.filter = parse_filter(j["filter"]);

  std::vector<Vec3> pts;
  for (const Pose& p : s.schedule.poses) pts.push_back(p.translation);
  for (const SceneObject& o : s.scene.objects) pts.push_back(o.center);
  if (all_collinear(pts))
    log_warn("viewpoints and object centres are collinear; depth will be poorly constrained");

  return s;
}

Scenario load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("scenario file not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scene_from_json(buf.str());
}

std::string scene_to_json(const Scenario& s) {
  json j;
  j["camera"] = {{"width", s.camera.width},
                 {"height", s.camera.height},
                 {"hfov_deg", s.camera.hfov_deg},
                 {"cx", s.camera.cx},
                 {"cy", s.camera.cy}};
  j["reach_m"] = s.scene.reach;
  j["objects"] = json::array();
  for (const SceneObject& o : s.scene.objects)
    j["objects"].push_back({{"id", o.id},
                            {"center_m", {o.center.x, o.center.y, o.center.z}},
                            {"radius_m", o.radius}});
  j["viewpoints"] = json::array();
  for (const Pose& p : s.schedule.poses)
    j["viewpoints"].push_back(
        {{"translation_m", {p.translation.x, p.translation.y, p.translation.z}},
         {"quaternion_xyzw",
          {p.rotation.x, p.rotation.y, p.rotation.z, p.rotation.w}}});
  if (s.noise) {
    j["noise"] = {{"center_sigma", s.noise->center_sigma},
                  {"size_sigma", s.noise->size_sigma},
                  {"dropout_prob", s.noise->dropout_prob},
                  {"rng_seed", s.noise->rng_seed}};
  }
  json f = json::object();
  if (s.filter.resolution_m) f["resolution_m"] = *s.filter.resolution_m;
  if (s.filter.kernel)
    f["kernel"] = *s.filter.kernel == KernelKind::Square ? "square" : "gaussian";
  if (s.filter.sigma_divisor) f["sigma_divisor"] = *s.filter.sigma_divisor;
  if (s.filter.threshold) f["threshold"] = *s.filter.threshold;
  if (!f.empty()) j["filter"] = f;
  return j.dump(2) + "\n";
}

void save_scene(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open scenario file for writing: " + path.string());
  out << scene_to_json(scenario);
}

}  // namespace mono3d
