#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "instascope/corpus.hpp"
#include "instascope/diversity.hpp"
#include "instascope/geometry.hpp"
#include "instascope/projection.hpp"
#include "instascope/selection.hpp"
#include "instascope/tisa.hpp"

namespace instascope {

struct AnalysisConfig {
  SelectionConfig selection;
  double redundancy_threshold = 0.95;
  TisaConfig tisa;
  KernelSpec kernel;
  int clusters = 8;
  // Compute geometric diversity on the selected features instead of the
  // full standardized matrix.
  bool diversity_on_selected = false;
  int histogram_bins = 20;
  std::uint64_t seed = 0;
  ProjectionConfig projection;
};

// Everything needed to place any suite with the same feature columns into a
// fitted instance space.
struct InstanceSpaceModel {
  std::vector<std::string> selected_names;
  Eigen::VectorXd selected_means;  // standardization of the selected columns
  Eigen::VectorXd selected_stds;
  FeatureSignificance significance;  // over the standardized columns
  std::vector<std::string> standardized_names;
  std::vector<std::string> dropped_constant_columns;
  std::vector<std::size_t> retained;  // after redundancy pruning
  SelectedFeatures selection;
  Projection projection;
  std::vector<FeatureRange> ranges;  // of the standardized selected columns
  Polygon boundary;
  std::vector<std::string> warnings;
};

// Standardize -> significance -> redundancy -> selection -> projection ->
// boundary. Rows with an Unknown outcome take part in standardization and
// the boundary ranges but not in selection or fitting. Failures are thrown
// as StageError.
InstanceSpaceModel fit_instance_space(const TestSuite& suite, const AnalysisConfig& config);

// Standardized selected columns of `suite` under the model's statistics.
Eigen::MatrixXd selected_features(const InstanceSpaceModel& model, const TestSuite& suite);

InstanceSpace build_instance_space(const InstanceSpaceModel& model, const TestSuite& suite);

// Shannon index over the declared categories (or k-means clusters) and the
// log-det geometric diversity.
DiversityScore suite_diversity(const TestSuite& suite, const AnalysisConfig& config,
                               const std::vector<std::string>& restrict_to = {});

// Full report for `suite` placed in `model`'s instance space: the three
// areas, coverage, diversity and per-feature outcome histograms.
TisaReport tisa_metrics(const TestSuite& suite, const InstanceSpaceModel& model,
                        const AnalysisConfig& config);

struct Analysis {
  InstanceSpaceModel model;
  InstanceSpace space;
  TisaReport report;
};

// Fits the space on `suite` and reports on the same suite.
Analysis analyze_suite(const TestSuite& suite, const AnalysisConfig& config);

}  // namespace instascope
