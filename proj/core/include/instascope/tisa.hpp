#pragma once

#include <span>
#include <string>
#include <vector>

#include "instascope/corpus.hpp"
#include "instascope/diversity.hpp"
#include "instascope/geometry.hpp"

namespace instascope {

// Outcome-split histogram of one feature over the pooled [min, max] range.
struct FeatureHistogram {
  std::string feature;
  double min = 0.0;
  double max = 0.0;
  std::vector<std::size_t> effective;
  std::vector<std::size_t> ineffective;
};

// One histogram per entry of `columns` (indices into `raw`). Rows with an
// Unknown outcome are ignored. The last bin is closed on the right.
std::vector<FeatureHistogram> feature_histograms(const FeatureMatrix& raw,
                                                 std::span<const std::size_t> columns,
                                                 std::span<const Outcome> outcomes,
                                                 int bins = 20);

struct TisaConfig {
  int grid_cells = 20;
  bool prune_outliers = false;
  int prune_k = 5;
};

struct TisaReport {
  double instance_space_area = 0.0;
  double buggy_region_area = 0.0;
  double boundary_area = 0.0;
  double coverage = 0.0;
  int grid_cells_per_axis = 0;
  std::size_t grid_cells_total = 0;
  std::size_t grid_cells_occupied = 0;
  DiversityScore diversity;
  std::vector<FeatureHistogram> per_feature_distributions;

  Polygon instance_hull;
  Polygon buggy_hull;
  std::vector<std::string> warnings;
};

// The geometric part of the report: the three areas and grid coverage for
// a computed instance space. Diversity and histograms are left empty.
TisaReport space_metrics(const InstanceSpace& space, const TisaConfig& config = {});

}  // namespace instascope
