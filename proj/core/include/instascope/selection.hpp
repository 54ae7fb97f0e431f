#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "instascope/corpus.hpp"

namespace instascope {

struct FeatureSignificanceEntry {
  std::string name;
  double point_biserial_r = 0.0;
  std::size_t abs_rank = 0;  // 1 = largest |r|; ties to the lower index
};

struct FeatureSignificance {
  std::vector<FeatureSignificanceEntry> entries;  // in column order

  // Column indices ordered by rank (most significant first).
  std::vector<std::size_t> by_rank() const;
};

// Point-biserial correlation of every column with the binary outcome
// (Effective = 1). Outcomes must be Effective or Ineffective only; both
// classes must be present (Error{kSingleClassOutcome}).
FeatureSignificance feature_significance(const FeatureMatrix& standardized,
                                         std::span<const Outcome> outcomes);

// Greedy redundancy pruning in significance order: a column is dropped when
// its |Pearson| with an already-retained, more significant column exceeds
// `threshold`. Returns retained column indices in ascending order.
std::vector<std::size_t> drop_redundant(const FeatureMatrix& standardized,
                                        const FeatureSignificance& significance,
                                        double threshold = 0.95);

struct SelectionConfig {
  std::size_t max_features = 10;
  double min_gain = 0.005;
  int neighbors = 5;
  int folds = 5;
  // The wrapper evaluates every ceil(n / max_rows)-th row when n is larger.
  std::size_t max_rows = 2000;
};

struct SelectionStep {
  std::size_t feature = 0;
  double balanced_accuracy = 0.0;
};

struct SelectedFeatures {
  std::vector<std::size_t> indices;  // into the FeatureMatrix columns
  std::vector<SelectionStep> selection_trace;
};

// Cross-validated balanced accuracy of a k-NN classifier restricted to
// `columns`. Fold of row i is i mod folds; neighbours by Euclidean distance,
// distance ties to the lower row index; majority vote (ties -> Effective).
// Balanced accuracy is pooled over all held-out predictions.
double knn_cv_balanced_accuracy(const Eigen::MatrixXd& values,
                                std::span<const int> labels,
                                std::span<const std::size_t> columns,
                                int neighbors = 5, int folds = 5);

// Greedy forward selection over `candidates` (typically drop_redundant's
// output). Each step adds the candidate with the best CV balanced accuracy;
// ties prefer higher significance, then the lower index. The first feature
// is always taken; later steps stop when the gain is below min_gain.
// Throws Error{kTooFewRows} for n < 10.
SelectedFeatures select_features(const FeatureMatrix& standardized,
                                 std::span<const Outcome> outcomes,
                                 const FeatureSignificance& significance,
                                 std::span<const std::size_t> candidates,
                                 const SelectionConfig& config = {});

// 0/1 encoding (Effective = 1). Throws for Unknown outcomes.
std::vector<int> binary_labels(std::span<const Outcome> outcomes);

}  // namespace instascope
