#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>

#include "../support/oracles.hpp"
#include "mono3d/detection.hpp"
#include "mono3d/errors.hpp"
#include "mono3d/scene.hpp"

using namespace mono3d;

namespace {

Scene one_sphere(const Vec3& center, double radius) {
  Scene scene;
  scene.objects.push_back({"o1", center, radius});
  scene.reach = 1.0;
  return scene;
}

std::filesystem::path temp_file(const char* name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("sphere dead ahead projects to the expected box") {
  const CameraModel cam = make_camera(640, 480, 90.0);
  const DetectionSet d = simulate_detections(one_sphere({1, 0, 0}, 0.05), Pose{}, cam);
  REQUIRE(d.boxes.size() == 1);
  CHECK(d.boxes[0].cx == 320.0);
  CHECK(d.boxes[0].cy == 240.0);
  CHECK(std::abs(d.boxes[0].bw - 32.0) <= 1e-9);  // 2*f*r/z
  CHECK(std::abs(d.boxes[0].bh - 32.0) <= 1e-9);
  CHECK(d.boxes[0].label == "o1");
  CHECK(d.boxes[0].confidence == 1.0);
}

TEST_CASE("objects behind or outside the image are excluded") {
  const CameraModel cam = make_camera(640, 480, 90.0);
  CHECK(simulate_detections(one_sphere({-1, 0, 0}, 0.05), Pose{}, cam).boxes.empty());
  // In front, but projecting far off the left edge.
  CHECK(simulate_detections(one_sphere({0.1, 10, 0}, 0.05), Pose{}, cam).boxes.empty());
}

TEST_CASE("boxes are clipped to the image") {
  const CameraModel cam = make_camera(640, 480, 90.0);
  // Centre projects at u = 320*(0.95/1) + 320 = 16 from the right edge.
  const DetectionSet d = simulate_detections(one_sphere({1, -0.95, 0}, 0.1), Pose{}, cam);
  REQUIRE(d.boxes.size() == 1);
  const BoundingBox& b = d.boxes[0];
  CHECK(b.cx + 0.5 * b.bw <= 640.0 + 1e-9);
  CHECK(b.bw < 64.0);  // lost the part beyond the edge
  CHECK(b.bh == doctest::Approx(64.0).epsilon(1e-9));
}

TEST_CASE("simulated boxes contain the projected centre") {
  const CameraModel cam = make_camera(640, 480, 90.0);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> depth(0.4, 2.0), lateral(-0.2, 0.2),
      radius(0.02, 0.08);
  for (int i = 0; i < 500; ++i) {
    const Vec3 center{depth(rng), lateral(rng), lateral(rng)};
    const double r = radius(rng);
    const DetectionSet d = simulate_detections(one_sphere(center, r), Pose{}, cam);
    REQUIRE(d.boxes.size() == 1);
    const Vec3 sensor = camera_to_sensor(center);
    const auto px = project(sensor, cam);
    REQUIRE(px.has_value());
    CHECK(std::abs(px->u - d.boxes[0].cx) <= 0.5 * d.boxes[0].bw + 1e-12);
    CHECK(std::abs(px->v - d.boxes[0].cy) <= 0.5 * d.boxes[0].bh + 1e-12);
  }
}

TEST_CASE("box width halves when distance doubles") {
  const CameraModel cam = make_camera(640, 480, 90.0);
  const DetectionSet near = simulate_detections(one_sphere({0.8, 0, 0}, 0.05), Pose{}, cam);
  const DetectionSet far = simulate_detections(one_sphere({1.6, 0, 0}, 0.05), Pose{}, cam);
  REQUIRE(near.boxes.size() == 1);
  REQUIRE(far.boxes.size() == 1);
  CHECK(std::abs(far.boxes[0].bw - 0.5 * near.boxes[0].bw) <= 1e-6);
}

TEST_CASE("zero noise is the identity") {
  const CameraModel cam = make_camera(640, 480, 90.0);
  const DetectionSet d = simulate_detections(one_sphere({1, 0.1, -0.05}, 0.06), Pose{}, cam);
  const DetectionSet out = apply_noise(d, NoiseModel{0.0, 0.0, 0.0, 99}, cam);
  CHECK(out == d);
}

TEST_CASE("full dropout empties the set") {
  const CameraModel cam = make_camera(640, 480, 90.0);
  const DetectionSet d = simulate_detections(one_sphere({1, 0, 0}, 0.05), Pose{}, cam);
  const DetectionSet out = apply_noise(d, NoiseModel{0.0, 0.0, 1.0, 5}, cam);
  CHECK(out.boxes.empty());
}

TEST_CASE("noise is reproducible per seed") {
  const CameraModel cam = make_camera(640, 480, 90.0);
  Scene scene = one_sphere({1, 0, 0}, 0.05);
  scene.objects.push_back({"o2", {1.2, 0.2, 0.1}, 0.08});
  scene.objects.push_back({"o3", {0.9, -0.25, -0.1}, 0.04});
  const DetectionSet d = simulate_detections(scene, Pose{}, cam);

  const NoiseModel noise{0.05, 0.05, 0.1, 1234};
  const DetectionSet a = apply_noise(d, noise, cam);
  const DetectionSet b = apply_noise(d, noise, cam);
  CHECK(detections_to_json(std::vector{a}) == detections_to_json(std::vector{b}));

  NoiseModel other = noise;
  other.rng_seed = 1235;
  const DetectionSet c = apply_noise(d, other, cam);
  CHECK(detections_to_json(std::vector{a}) != detections_to_json(std::vector{c}));
}

TEST_CASE("noised sizes stay at least one pixel") {
  const CameraModel cam = make_camera(640, 480, 90.0);
  const DetectionSet d = simulate_detections(one_sphere({1, 0, 0}, 0.05), Pose{}, cam);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const DetectionSet out = apply_noise(d, NoiseModel{0.0, 2.0, 0.0, seed}, cam);
    for (const BoundingBox& b : out.boxes) {
      CHECK(b.bw >= 1.0);
      CHECK(b.bh >= 1.0);
    }
  }
}

TEST_CASE("dropout keeps the expected box count on average") {
  const CameraModel cam = make_camera(640, 480, 90.0);
  DetectionSet d;
  for (int i = 0; i < 10; ++i)
    d.boxes.push_back({100.0 + 40.0 * i, 200.0, 20.0, 20.0, "b", 1.0});

  const double dropout = 0.3;
  const int trials = 10000;
  long long kept = 0;
  for (int t = 0; t < trials; ++t) {
    const DetectionSet out =
        apply_noise(d, NoiseModel{0.0, 0.0, dropout, static_cast<std::uint64_t>(t)}, cam);
    kept += static_cast<long long>(out.boxes.size());
  }
  // kept ~ Binomial(trials*10, 0.7): mean 70000, sigma = sqrt(n*p*q) ~ 145.
  const double mean = trials * 10 * (1.0 - dropout);
  const double sigma = std::sqrt(trials * 10 * dropout * (1.0 - dropout));
  CHECK(std::abs(kept - mean) <= 3.0 * sigma);
}

TEST_CASE("detection files round trip and validate") {
  const CameraModel cam = make_camera(640, 480, 90.0);
  Scene scene = one_sphere({1, 0, 0}, 0.05);
  scene.objects.push_back({"o2", {1.1, 0.15, 0.0}, 0.07});
  std::vector<DetectionSet> sets;
  for (int v = 0; v < 3; ++v) {
    DetectionSet d = simulate_detections(scene, Pose{}, cam);
    d.viewpoint_index = v;
    sets.push_back(d);
  }
  const auto path = std::filesystem::temp_directory_path() / "mono3d_dets_roundtrip.json";
  save_detections(sets, path);
  const auto loaded = load_detections(path);
  CHECK(loaded == sets);

  CHECK_THROWS_AS(load_detections("/nonexistent/dets.json"), ConfigError);
  CHECK_THROWS_AS(load_detections(temp_file("mono3d_dets_bad.json", "[1,2,")), ParseError);
  CHECK_THROWS_AS(load_detections(temp_file(
                      "mono3d_dets_unknown.json",
                      R"({"detections": [{"viewpoint_index": 0, "boxes": [], "extra": 1}]})")),
                  ValidationError);
  CHECK_THROWS_AS(load_detections(temp_file(
                      "mono3d_dets_conf.json",
                      R"({"detections": [{"viewpoint_index": 0, "boxes":
                         [{"cx": 1, "cy": 1, "bw": 2, "bh": 2, "confidence": 1.5}]}]})")),
                  ValidationError);
  CHECK_THROWS_AS(load_detections(temp_file(
                      "mono3d_dets_dup.json",
                      R"({"detections": [{"viewpoint_index": 0, "boxes": []},
                                         {"viewpoint_index": 0, "boxes": []}]})")),
                  ValidationError);
  CHECK_THROWS_AS(load_detections(temp_file(
                      "mono3d_dets_size.json",
                      R"({"detections": [{"viewpoint_index": 0, "boxes":
                         [{"cx": 1, "cy": 1, "bw": 0, "bh": 2}]}]})")),
                  ValidationError);
}
