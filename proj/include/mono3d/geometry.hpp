#pragma once

#include <optional>

namespace mono3d {

// Frame conventions used throughout:
//   world  - manipulator base frame, metres
//   camera - moving camera body: x forward, y left, z up
//   sensor - optical frame sharing the camera origin: z forward, x right, y down
//   image  - pixels, origin top-left, u right, v down
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3&) const = default;
};

double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);
bool is_finite(const Vec3& v);

// Component order is (x, y, z, w) in every API and file format.
struct Quaternion {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double w = 1.0;

  bool operator==(const Quaternion&) const = default;
};

double norm(const Quaternion& q);
// Unit-length copy. Throws ValidationError for zero or non-finite input.
Quaternion normalized(const Quaternion& q);
Quaternion conjugate(const Quaternion& q);
// Rotates v by the unit quaternion q (coordinates of a camera-frame vector
// expressed in the world frame, for a camera pose rotation).
Vec3 rotate(const Quaternion& q, const Vec3& v);

// Camera placement in the world frame. rotation maps camera-frame
// coordinates into world-frame coordinates.
struct Pose {
  Vec3 translation;
  Quaternion rotation;

  bool operator==(const Pose&) const = default;
};

Vec3 world_to_camera(const Vec3& p_world, const Pose& pose);
Vec3 camera_to_world(const Vec3& p_camera, const Pose& pose);

// Fixed camera->sensor change of basis: (x, y, z) -> (-y, -z, x).
// The camera's forward axis becomes the sensor's optical z axis.
Vec3 camera_to_sensor(const Vec3& p_camera);

// f = 0.5*w / tan(0.5*hfov*pi/180). Throws InvalidFov unless 0 < hfov < 180.
double focal_from_hfov(int width_px, double hfov_deg);

struct CameraModel {
  int width = 0;        // px
  int height = 0;       // px
  double hfov_deg = 0;  // horizontal field of view, degrees
  double focal = 0;     // px, derived from width and hfov
  double cx = 0;        // principal point, px
  double cy = 0;

  bool operator==(const CameraModel&) const = default;
};

// Principal point defaults to the image centre; the calibrated overload is
// for replayed real-camera data.
CameraModel make_camera(int width, int height, double hfov_deg);
CameraModel make_camera(int width, int height, double hfov_deg, double cx, double cy);

struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

// Pinhole projection of a sensor-frame point: u = f*x/z + cx, v = f*y/z + cy.
// Empty when p.z <= 0 (at or behind the sensor plane, unobservable).
std::optional<Pixel> project(const Vec3& p_sensor, const CameraModel& cam);

}  // namespace mono3d
