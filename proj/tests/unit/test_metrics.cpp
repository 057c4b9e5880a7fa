#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include <doctest.h>

#include "../support/oracles.hpp"
#include "mono3d/errors.hpp"
#include "mono3d/metrics.hpp"

using namespace mono3d;

namespace {

std::vector<SceneObject> objects_at(const std::vector<Vec3>& centers) {
  std::vector<SceneObject> out;
  for (std::size_t i = 0; i < centers.size(); ++i)
    out.push_back({"o" + std::to_string(i), centers[i], 0.05});
  return out;
}

// The six hand-computed pairs; expected metric values were worked out with
// high-precision arithmetic and frozen here.
std::vector<MatchedPair> fixture_pairs() {
  return {
      {"s1", {0.50, -0.22, 0.12}, {0.503, -0.216, 0.1185}},
      {"s2", {0.55, 0.00, 0.12}, {0.5445, 0.0043, 0.1261}},
      {"s3", {0.50, 0.22, 0.12}, {0.492, 0.2227, 0.11}},
      {"s4", {0.60, -0.22, -0.12}, {0.611, -0.2283, -0.1159}},
      {"s5", {0.55, 0.00, -0.12}, {0.5568, 0.0, -0.1207}},
      {"s6", {0.60, 0.22, -0.12}, {0.5921, 0.2114, -0.13}},
  };
}

}  // namespace

TEST_CASE("matching identical lists is the identity") {
  const std::vector<Vec3> centers{{0, 0, 0}, {1, 0, 0}, {0, 2, 0}};
  const auto truths = objects_at(centers);
  const auto pairs = match_estimates(truths, centers);
  REQUIRE(pairs.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(pairs[i].object_id == truths[i].id);
    CHECK(norm(pairs[i].truth - pairs[i].estimate) == 0.0);
  }
}

TEST_CASE("matching recovers a swap") {
  const auto truths = objects_at({{0, 0, 0}, {1, 0, 0}});
  const std::vector<Vec3> estimates{{1.01, 0, 0}, {0.01, 0, 0}};
  const auto pairs = match_estimates(truths, estimates);
  CHECK(norm(pairs[0].estimate - Vec3{0.01, 0, 0}) == 0.0);
  CHECK(norm(pairs[1].estimate - Vec3{1.01, 0, 0}) == 0.0);
}

TEST_CASE("matching agrees with the permutation oracle") {
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<Vec3> t(3), e(3);
    for (int i = 0; i < 3; ++i) {
      t[i] = oracle::random_vec3(rng, 1.0);
      e[i] = oracle::random_vec3(rng, 1.0);
    }
    const auto pairs = match_estimates(objects_at(t), e);
    double got = 0.0;
    for (const MatchedPair& p : pairs) got += norm(p.truth - p.estimate);

    std::vector<int> perm{0, 1, 2};
    double best = 1e18;
    do {
      double total = 0.0;
      for (int i = 0; i < 3; ++i) total += norm(t[i] - e[perm[i]]);
      best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(std::abs(got - best) <= 1e-12);
  }
}

TEST_CASE("matching validates counts") {
  const auto truths = objects_at({{0, 0, 0}, {1, 0, 0}});
  const std::vector<Vec3> estimates{{0, 0, 0}};
  CHECK_THROWS_AS(match_estimates(truths, estimates), CountMismatch);
  CHECK_THROWS_AS(match_estimates({}, {}), EmptyInput);
}

TEST_CASE("perfect estimates give zero errors") {
  const std::vector<MatchedPair> pairs{{"a", {1, 2, 3}, {1, 2, 3}},
                                       {"b", {-1, 0, 4}, {-1, 0, 4}}};
  const ErrorReport r = compute_errors(pairs);
  CHECK(r.mae == 0.0);
  CHECK(r.mse == 0.0);
  CHECK(r.rmse == 0.0);
  CHECK(r.mape == 0.0);
  CHECK(r.mean_euclidean == 0.0);
}

TEST_CASE("single-pair analytic values") {
  const std::vector<MatchedPair> pairs{{"a", {1, 1, 1}, {1.01, 1, 1}}};
  const ErrorReport r = compute_errors(pairs);
  CHECK(std::abs(r.mae - 0.01 / 3.0) <= 1e-15);
  CHECK(std::abs(r.mean_euclidean - 0.01) <= 1e-12);
  CHECK(std::abs(r.mape - 100.0 * 0.01 / 3.0) <= 1e-12);
  CHECK(r.component_count == 3);
}

TEST_CASE("frozen fixture reproduces all five metrics") {
  const ErrorReport r = compute_errors(fixture_pairs());
  CHECK(std::abs(r.mae - 0.005694444444444445) <= 1e-12);
  CHECK(std::abs(r.mse - 4.301611111111111e-05) <= 1e-12);
  CHECK(std::abs(r.rmse - 0.006558666869960016) <= 1e-12);
  CHECK(std::abs(r.mape - 2.8321022727272727) <= 1e-12);
  CHECK(std::abs(r.mean_euclidean - 0.01069436414769794) <= 1e-12);
  CHECK(r.component_count == 18);
  CHECK(r.mape_excluded == 2);  // the two exact-zero truth components
  CHECK(std::abs(r.per_axis[0].mae - 0.007033333333333333) <= 1e-12);
  CHECK(std::abs(r.per_axis[1].mae - 0.00465) <= 1e-12);
  CHECK(std::abs(r.per_axis[2].mae - 0.0054) <= 1e-12);
  CHECK(std::abs(r.rmse * r.rmse - r.mse) <= 1e-12);
}

TEST_CASE("mae never exceeds rmse") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<MatchedPair> pairs;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i)
      pairs.push_back({"o", oracle::random_vec3(rng, 2.0), oracle::random_vec3(rng, 2.0)});
    const ErrorReport r = compute_errors(pairs);
    CHECK(r.mae <= r.rmse + 1e-12);
  }
}

TEST_CASE("metrics are pair-order invariant") {
  auto pairs = fixture_pairs();
  const ErrorReport a = compute_errors(pairs);
  std::reverse(pairs.begin(), pairs.end());
  const ErrorReport b = compute_errors(pairs);
  CHECK(std::abs(a.mae - b.mae) <= 1e-12);
  CHECK(std::abs(a.mse - b.mse) <= 1e-12);
  CHECK(std::abs(a.rmse - b.rmse) <= 1e-12);
  CHECK(std::abs(a.mape - b.mape) <= 1e-12);
  CHECK(std::abs(a.mean_euclidean - b.mean_euclidean) <= 1e-12);
}

TEST_CASE("translation leaves absolute metrics unchanged") {
  const Vec3 offset{10.0, -3.5, 2.25};
  auto pairs = fixture_pairs();
  const ErrorReport a = compute_errors(pairs);
  for (MatchedPair& p : pairs) {
    p.truth = p.truth + offset;
    p.estimate = p.estimate + offset;
  }
  const ErrorReport b = compute_errors(pairs);
  CHECK(std::abs(a.mae - b.mae) <= 1e-12);
  CHECK(std::abs(a.mse - b.mse) <= 1e-12);
  CHECK(std::abs(a.rmse - b.rmse) <= 1e-12);
  CHECK(std::abs(a.mean_euclidean - b.mean_euclidean) <= 1e-12);
}

TEST_CASE("mape guard skips near-zero truth components") {
  const std::vector<MatchedPair> pairs{{"a", {1e-9, 1.0, 1.0}, {0.1, 1.1, 1.0}}};
  const ErrorReport r = compute_errors(pairs);
  CHECK(r.mape_excluded == 1);
  CHECK(std::abs(r.mape - 100.0 * (0.1 / 1.0) / 2.0) <= 1e-12);
  CHECK_THROWS_AS(compute_errors({}), EmptyInput);
}

TEST_CASE("csv exports") {
  const ErrorReport r = compute_errors(fixture_pairs());
  const auto dir = std::filesystem::temp_directory_path();
  write_metrics_csv(r, dir / "mono3d_metrics_test.csv");
  write_per_object_csv(r, dir / "mono3d_per_object_test.csv");

  std::ifstream metrics(dir / "mono3d_metrics_test.csv");
  std::string line;
  std::getline(metrics, line);
  CHECK(line == "metric,value,unit");
  std::getline(metrics, line);
  CHECK(line.rfind("mae,", 0) == 0);
  const double parsed = std::strtod(line.c_str() + 4, nullptr);
  CHECK(parsed == r.mae);  // shortest round-trip formatting

  std::ifstream per_object(dir / "mono3d_per_object_test.csv");
  std::getline(per_object, line);
  CHECK(line == "object_id,axis,truth_m,estimate_m,abs_error_m");
  int rows = 0;
  while (std::getline(per_object, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 18);  // six objects, three axes
}
