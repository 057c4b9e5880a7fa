#include "mono3d/geometry.hpp"

#include <cmath>

#include "mono3d/errors.hpp"

namespace mono3d {

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

double norm(const Quaternion& q) {
  return std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z + q.w * q.w);
}

Quaternion normalized(const Quaternion& q) {
  const double n = norm(q);
  if (!std::isfinite(n) || n < 1e-12)
    throw ValidationError("quaternion: zero or non-finite norm");
  return {q.x / n, q.y / n, q.z / n, q.w / n};
}

Quaternion conjugate(const Quaternion& q) { return {-q.x, -q.y, -q.z, q.w}; }

Vec3 rotate(const Quaternion& q, const Vec3& v) {
  // v' = v + 2*qw*(qv x v) + 2*(qv x (qv x v))
  const Vec3 qv{q.x, q.y, q.z};
  const Vec3 t = cross(qv, v) * 2.0;
  return v + t * q.w + cross(qv, t);
}

Vec3 world_to_camera(const Vec3& p_world, const Pose& pose) {
  return rotate(conjugate(pose.rotation), p_world - pose.translation);
}

Vec3 camera_to_world(const Vec3& p_camera, const Pose& pose) {
  return rotate(pose.rotation, p_camera) + pose.translation;
}

Vec3 camera_to_sensor(const Vec3& p_camera) {
  return {-p_camera.y, -p_camera.z, p_camera.x};
}

double focal_from_hfov(int width_px, double hfov_deg) {
  if (!(hfov_deg > 0.0 && hfov_deg < 180.0))
    throw InvalidFov("hfov_deg must be in (0, 180), got " + std::to_string(hfov_deg));
  return 0.5 * static_cast<double>(width_px) / std::tan(0.5 * hfov_deg * M_PI / 180.0);
}

CameraModel make_camera(int width, int height, double hfov_deg) {
  return make_camera(width, height, hfov_deg, 0.5 * width, 0.5 * height);
}

CameraModel make_camera(int width, int height, double hfov_deg, double cx, double cy) {
  if (width < 1) throw ValidationError("camera.width must be >= 1");
  if (height < 1) throw ValidationError("camera.height must be >= 1");
  CameraModel cam;
  cam.width = width;
  cam.height = height;
  cam.hfov_deg = hfov_deg;
  cam.focal = focal_from_hfov(width, hfov_deg);
  cam.cx = cx;
  cam.cy = cy;
  return cam;
}

std::optional<Pixel> project(const Vec3& p_sensor, const CameraModel& cam) {
  if (p_sensor.z <= 0.0) return std::nullopt;
  return Pixel{cam.focal * (p_sensor.x / p_sensor.z) + cam.cx,
               cam.focal * (p_sensor.y / p_sensor.z) + cam.cy};
}

}  // namespace mono3d
