#include "instascope/tisa.hpp"

#include <algorithm>
#include <cmath>

#include "instascope/error.hpp"

namespace instascope {

std::vector<FeatureHistogram> feature_histograms(const FeatureMatrix& raw,
                                                 std::span<const std::size_t> columns,
                                                 std::span<const Outcome> outcomes,
                                                 int bins) {
  if (bins < 1) throw Error(ErrorCode::kInvalidArgument, "histograms need >= 1 bin");
  if (outcomes.size() != static_cast<std::size_t>(raw.rows())) {
    throw Error(ErrorCode::kDimensionMismatch, "outcomes do not match rows");
  }
  std::vector<FeatureHistogram> out;
  for (auto c : columns) {
    if (c >= static_cast<std::size_t>(raw.cols())) {
      throw Error(ErrorCode::kDimensionMismatch, "histogram column out of range");
    }
    const auto col = raw.values.col(static_cast<Eigen::Index>(c));
    FeatureHistogram h;
    h.feature = raw.names[c];
    h.effective.assign(static_cast<std::size_t>(bins), 0);
    h.ineffective.assign(static_cast<std::size_t>(bins), 0);
    bool any = false;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (outcomes[static_cast<std::size_t>(i)] == Outcome::kUnknown) continue;
      if (!any) {
        h.min = h.max = col(i);
        any = true;
      }
      h.min = std::min(h.min, col(i));
      h.max = std::max(h.max, col(i));
    }
    const double width = (h.max - h.min) / bins;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      const auto outcome = outcomes[static_cast<std::size_t>(i)];
      if (outcome == Outcome::kUnknown) continue;
      int bin = 0;
      if (width > 0.0) {
        bin = std::clamp(static_cast<int>(std::floor((col(i) - h.min) / width)), 0, bins - 1);
      }
      auto& counts = outcome == Outcome::kEffective ? h.effective : h.ineffective;
      ++counts[static_cast<std::size_t>(bin)];
    }
    out.push_back(std::move(h));
  }
  return out;
}

TisaReport space_metrics(const InstanceSpace& space, const TisaConfig& config) {
  TisaReport report;
  report.boundary_area = polygon_area(space.boundary);
  if (!space.points.empty()) {
    report.instance_hull = convex_hull(space.points);
    report.instance_space_area = polygon_area(report.instance_hull);
  }
  report.buggy_hull = buggy_region(space, config.prune_outliers, config.prune_k);
  report.buggy_region_area = polygon_area(report.buggy_hull);
  if (report.buggy_hull.vertices.empty()) {
    report.warnings.emplace_back("no failing test cases: buggy region is empty");
  }
  const auto grid = coverage_grid(space.points, space.boundary, config.grid_cells);
  report.grid_cells_per_axis = grid.cells_per_axis;
  report.grid_cells_total = grid.total;
  report.grid_cells_occupied = grid.occupied;
  report.coverage = grid.coverage;
  return report;
}

}  // namespace instascope
