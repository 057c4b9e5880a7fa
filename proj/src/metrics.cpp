#include "mono3d/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "mono3d/csv.hpp"
#include "mono3d/errors.hpp"

namespace mono3d {

namespace {
constexpr double kMapeTruthFloor = 1e-6;  // m
}

std::vector<MatchedPair> match_estimates(std::span<const SceneObject> truths,
                                         std::span<const Vec3> estimates) {
  if (truths.size() != estimates.size())
    throw CountMismatch("match_estimates: " + std::to_string(truths.size()) + " truths vs " +
                        std::to_string(estimates.size()) + " estimates");
  if (truths.empty()) throw EmptyInput("match_estimates: nothing to match");
  const std::size_t n = truths.size();
  if (n > 10)
    throw InvalidInput("match_estimates: exhaustive assignment supports at most 10 objects");

  std::vector<std::size_t> perm(n), best_perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  best_perm = perm;
  double best_total = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += norm(truths[i].center - estimates[perm[i]]);
    if (total < best_total) {
      best_total = total;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<MatchedPair> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    pairs.push_back({truths[i].id, truths[i].center, estimates[best_perm[i]]});
  return pairs;
}

ErrorReport compute_errors(std::span<const MatchedPair> pairs) {
  if (pairs.empty()) throw EmptyInput("compute_errors: no matched pairs");

  ErrorReport report;
  double abs_sum = 0.0, sq_sum = 0.0, mape_sum = 0.0, eucl_sum = 0.0;
  int mape_n = 0;
  std::array<double, 3> axis_abs{}, axis_sq{};

  for (const MatchedPair& p : pairs) {
    const std::array<double, 3> t{p.truth.x, p.truth.y, p.truth.z};
    const std::array<double, 3> e{p.estimate.x, p.estimate.y, p.estimate.z};
    for (int a = 0; a < 3; ++a) {
      const double d = t[a] - e[a];
      abs_sum += std::abs(d);
      sq_sum += d * d;
      axis_abs[a] += std::abs(d);
      axis_sq[a] += d * d;
      if (std::abs(t[a]) >= kMapeTruthFloor) {
        mape_sum += std::abs(d / t[a]);
        ++mape_n;
      } else {
        ++report.mape_excluded;
      }
    }
    eucl_sum += norm(p.truth - p.estimate);
  }

  const double n_comp = 3.0 * static_cast<double>(pairs.size());
  report.component_count = static_cast<int>(n_comp);
  report.mae = abs_sum / n_comp;
  report.mse = sq_sum / n_comp;
  report.rmse = std::sqrt(report.mse);
  report.mape = mape_n > 0 ? mape_sum / static_cast<double>(mape_n) * 100.0 : 0.0;
  report.mean_euclidean = eucl_sum / static_cast<double>(pairs.size());
  for (int a = 0; a < 3; ++a) {
    report.per_axis[a].mae = axis_abs[a] / static_cast<double>(pairs.size());
    report.per_axis[a].mse = axis_sq[a] / static_cast<double>(pairs.size());
    report.per_axis[a].rmse = std::sqrt(report.per_axis[a].mse);
  }

  std::map<std::string, ObjectErrors> by_object;
  for (const MatchedPair& p : pairs) {
    ObjectErrors& o = by_object[p.object_id];
    o.object_id = p.object_id;
    o.truth = p.truth;
    o.mean_estimate = o.mean_estimate + p.estimate;
    o.mean_abs_error =
        o.mean_abs_error + Vec3{std::abs(p.truth.x - p.estimate.x),
                                std::abs(p.truth.y - p.estimate.y),
                                std::abs(p.truth.z - p.estimate.z)};
    ++o.measures;
  }
  for (auto& [id, o] : by_object) {
    const double inv = 1.0 / static_cast<double>(o.measures);
    o.mean_estimate = o.mean_estimate * inv;
    o.mean_abs_error = o.mean_abs_error * inv;
    report.per_object.push_back(o);
  }
  return report;
}

void write_metrics_csv(const ErrorReport& report, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "metric,value,unit\n";
  out << "mae," << format_double(report.mae) << ",m\n";
  out << "mse," << format_double(report.mse) << ",m^2\n";
  out << "rmse," << format_double(report.rmse) << ",m\n";
  out << "mape," << format_double(report.mape) << ",percent\n";
  out << "mean_euclidean," << format_double(report.mean_euclidean) << ",m\n";
  const char* axis_names[3] = {"x", "y", "z"};
  for (int a = 0; a < 3; ++a) {
    out << "mae_" << axis_names[a] << ',' << format_double(report.per_axis[a].mae) << ",m\n";
    out << "rmse_" << axis_names[a] << ',' << format_double(report.per_axis[a].rmse) << ",m\n";
  }
  out << "component_count," << report.component_count << ",count\n";
  out << "mape_excluded_components," << report.mape_excluded << ",count\n";
}

void write_per_object_csv(const ErrorReport& report, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "object_id,axis,truth_m,estimate_m,abs_error_m\n";
  const char* axis_names[3] = {"x", "y", "z"};
  for (const ObjectErrors& o : report.per_object) {
    const std::array<double, 3> t{o.truth.x, o.truth.y, o.truth.z};
    const std::array<double, 3> e{o.mean_estimate.x, o.mean_estimate.y, o.mean_estimate.z};
    const std::array<double, 3> a{o.mean_abs_error.x, o.mean_abs_error.y, o.mean_abs_error.z};
    for (int i = 0; i < 3; ++i)
      out << o.object_id << ',' << axis_names[i] << ',' << format_double(t[i]) << ','
          << format_double(e[i]) << ',' << format_double(a[i]) << '\n';
  }
}

}  // namespace mono3d
