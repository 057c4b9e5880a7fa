#include <string>

#include <doctest.h>

#include "mono3d/errors.hpp"
#include "mono3d/scene.hpp"

using namespace mono3d;

namespace {

const char* kMinimal = R"({
  "camera": {"width": 640, "height": 480, "hfov_deg": 90.0},
  "reach_m": 0.5,
  "objects": [{"id": "a", "center_m": [0.5, 0.0, 0.1], "radius_m": 0.05}],
  "viewpoints": [
    {"translation_m": [0, 0, 0], "quaternion_xyzw": [0, 0, 0, 1]},
    {"translation_m": [0, 0.2, 0], "quaternion_xyzw": [0, 0, 0, 1]}
  ]
})";

std::string fixture_path(const char* name) {
  return std::string(MONO3D_FIXTURE_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("minimal scenario parses") {
  const Scenario s = scene_from_json(kMinimal);
  CHECK(s.scene.objects.size() == 1);
  CHECK(s.scene.objects[0].id == "a");
  CHECK(s.scene.reach == 0.5);
  CHECK(s.schedule.poses.size() == 2);
  CHECK(s.camera.cx == 320.0);  // defaulted principal point
  CHECK(s.camera.cy == 240.0);
  CHECK_FALSE(s.noise.has_value());
}

TEST_CASE("bundled six-sphere scenario") {
  const Scenario s = load_scene(fixture_path("sim6.scenario"));
  CHECK(s.scene.objects.size() == 6);
  CHECK(s.schedule.poses.size() == 3);
  CHECK(s.camera.width == 640);
  CHECK(s.camera.height == 480);
  CHECK(s.camera.hfov_deg == 90.0);
  int small = 0, large = 0;
  for (const SceneObject& o : s.scene.objects) {
    if (o.radius == 0.05) ++small;
    if (o.radius == 0.10) ++large;
  }
  CHECK(small == 3);
  CHECK(large == 3);
}

TEST_CASE("negative radius names the field") {
  std::string bad = kMinimal;
  bad.replace(bad.find("0.05"), 4, "-0.05");
  try {
    scene_from_json(bad);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("radius") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected") {
  std::string extra = kMinimal;
  extra.insert(extra.find("\"reach_m\""), "\"unexpected\": 1, ");
  CHECK_THROWS_AS(scene_from_json(extra), ValidationError);

  std::string extra_cam = kMinimal;
  extra_cam.insert(extra_cam.find("\"width\""), "\"fps\": 30, ");
  CHECK_THROWS_AS(scene_from_json(extra_cam), ValidationError);
}

TEST_CASE("schedule needs two poses") {
  std::string one = R"({
    "camera": {"width": 640, "height": 480, "hfov_deg": 90.0},
    "reach_m": 0.5,
    "objects": [],
    "viewpoints": [{"translation_m": [0,0,0], "quaternion_xyzw": [0,0,0,1]}]
  })";
  CHECK_THROWS_AS(scene_from_json(one), ValidationError);
}

TEST_CASE("duplicate object ids are rejected") {
  std::string dup = kMinimal;
  dup.replace(dup.find("\"objects\": ["), 12,
              "\"objects\": [{\"id\": \"a\", \"center_m\": [0.1,0,0], \"radius_m\": 0.02},");
  CHECK_THROWS_AS(scene_from_json(dup), ValidationError);
}

TEST_CASE("malformed json is a parse error") {
  CHECK_THROWS_AS(scene_from_json("{ not json"), ParseError);
}

TEST_CASE("zero quaternion is rejected with the field name") {
  std::string bad = kMinimal;
  bad.replace(bad.find("[0, 0, 0, 1]"), 12, "[0, 0, 0, 0]");
  try {
    scene_from_json(bad);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("quaternion_xyzw") != std::string::npos);
  }
}

TEST_CASE("noise and filter blocks") {
  std::string with_blocks = kMinimal;
  with_blocks.insert(
      with_blocks.rfind('}'),
      R"(, "noise": {"center_sigma": 0.05, "dropout_prob": 0.02, "rng_seed": 7},
         "filter": {"kernel": "gaussian", "sigma_divisor": 3.0, "resolution_m": 0.02})");
  const Scenario s = scene_from_json(with_blocks);
  REQUIRE(s.noise.has_value());
  CHECK(s.noise->center_sigma == 0.05);
  CHECK(s.noise->size_sigma == 0.0);
  CHECK(s.noise->dropout_prob == 0.02);
  CHECK(s.noise->rng_seed == 7);
  CHECK(s.filter.kernel == KernelKind::Gaussian);
  CHECK(s.filter.sigma_divisor == 3.0);
  CHECK(s.filter.resolution_m == 0.02);
  CHECK_FALSE(s.filter.threshold.has_value());

  std::string bad_kernel = with_blocks;
  bad_kernel.replace(bad_kernel.find("gaussian"), 8, "triangle");
  CHECK_THROWS_AS(scene_from_json(bad_kernel), ValidationError);

  std::string bad_dropout = with_blocks;
  bad_dropout.replace(bad_dropout.find("0.02"), 4, "1.50");
  CHECK_THROWS_AS(scene_from_json(bad_dropout), ValidationError);
}

TEST_CASE("loading is deterministic and round trips") {
  const Scenario a = scene_from_json(kMinimal);
  const Scenario b = scene_from_json(kMinimal);
  CHECK(a == b);

  const Scenario fixture = load_scene(fixture_path("sim6.scenario"));
  const Scenario reparsed = scene_from_json(scene_to_json(fixture));
  CHECK(fixture == reparsed);
}

TEST_CASE("collinearity detection") {
  const Vec3 a{0, 0, 0}, b{0, 0, 0.5}, c{0, 0, 1.2}, d{0.3, 0, 0.4};
  CHECK(all_collinear(std::vector<Vec3>{a, b, c}));
  CHECK_FALSE(all_collinear(std::vector<Vec3>{a, b, c, d}));
  CHECK(all_collinear(std::vector<Vec3>{a, b}));  // two points always line up

  // Collinear viewpoints and objects load fine; the loader only warns.
  std::string collinear = R"({
    "camera": {"width": 640, "height": 480, "hfov_deg": 90.0},
    "reach_m": 0.5,
    "objects": [{"id": "a", "center_m": [1.2, 0.0, 0.0], "radius_m": 0.05}],
    "viewpoints": [
      {"translation_m": [0, 0, 0], "quaternion_xyzw": [0, 0, 0, 1]},
      {"translation_m": [0.2, 0, 0], "quaternion_xyzw": [0, 0, 0, 1]}
    ]
  })";
  CHECK(scene_from_json(collinear).schedule.poses.size() == 2);
}
