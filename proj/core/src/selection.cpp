#include "instascope/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "instascope/error.hpp"
#include "instascope/stats.hpp"

namespace instascope {

std::vector<int> binary_labels(std::span<const Outcome> outcomes) {
  std::vector<int> y;
  y.reserve(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    switch (outcomes[i]) {
      case Outcome::kEffective:
        y.push_back(1);
        break;
      case Outcome::kIneffective:
        y.push_back(0);
        break;
      case Outcome::kUnknown:
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("row {} has an unknown outcome", i + 1));
    }
  }
  return y;
}

std::vector<std::size_t> FeatureSignificance::by_rank() const {
  std::vector<std::size_t> order(entries.size());
  for (std::size_t j = 0; j < entries.size(); ++j) {
    order[entries[j].abs_rank - 1] = j;
  }
  return order;
}

FeatureSignificance feature_significance(const FeatureMatrix& standardized,
                                         std::span<const Outcome> outcomes) {
  const auto n = static_cast<std::size_t>(standardized.rows());
  if (outcomes.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("{} outcomes for {} rows", outcomes.size(), n));
  }
  const auto y = binary_labels(outcomes);
  const auto n_fail = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  if (n_fail == 0 || n_fail == n) {
    throw Error(ErrorCode::kSingleClassOutcome,
                "outcomes contain a single class; need both fail and pass");
  }
  const double p = static_cast<double>(n_fail) / static_cast<double>(n);
  const double q = 1.0 - p;

  FeatureSignificance sig;
  for (Eigen::Index j = 0; j < standardized.cols(); ++j) {
    const auto col = standardized.values.col(j);
    double sum_fail = 0.0, sum_pass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      (y[i] == 1 ? sum_fail : sum_pass) += col(static_cast<Eigen::Index>(i));
    }
    const double mean_fail = sum_fail / static_cast<double>(n_fail);
    const double mean_pass = sum_pass / static_cast<double>(n - n_fail);
    const double mu = col.mean();
    const double sigma =
        std::sqrt((col.array() - mu).square().sum() / static_cast<double>(n));
    double r = 0.0;
    if (sigma > 0.0) {
      r = std::clamp((mean_fail - mean_pass) / sigma * std::sqrt(p * q), -1.0, 1.0);
    }
    sig.entries.push_back({standardized.names[static_cast<std::size_t>(j)], r, 0});
  }

  std::vector<std::size_t> order(sig.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(sig.entries[a].point_biserial_r) >
           std::abs(sig.entries[b].point_biserial_r);
  });
  for (std::size_t k = 0; k < order.size(); ++k) {
    sig.entries[order[k]].abs_rank = k + 1;
  }
  return sig;
}

std::vector<std::size_t> drop_redundant(const FeatureMatrix& standardized,
                                        const FeatureSignificance& significance,
                                        double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("redundancy threshold {} outside (0, 1]", threshold));
  }
  if (significance.entries.size() != static_cast<std::size_t>(standardized.cols())) {
    throw Error(ErrorCode::kDimensionMismatch,
                "significance does not match the matrix columns");
  }
  const auto n = static_cast<std::size_t>(standardized.rows());
  auto column = [&](std::size_t j) {
    return std::span<const double>(standardized.values.col(static_cast<Eigen::Index>(j)).data(), n);
  };

  std::vector<std::size_t> kept;
  for (std::size_t j : significance.by_rank()) {
    const bool redundant = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return std::abs(stats::pearson(column(j), column(k))) > threshold;
    });
    if (!redundant) kept.push_back(j);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

double knn_cv_balanced_accuracy(const Eigen::MatrixXd& values,
                                std::span<const int> labels,
                                std::span<const std::size_t> columns,
                                int neighbors, int folds) {
  const Eigen::Index n = values.rows();
  if (static_cast<std::size_t>(n) != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "labels do not match rows");
  }
  if (neighbors < 1 || folds < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need neighbors >= 1, folds >= 2");
  }
  struct Neighbor {
    double dist;
    Eigen::Index row;
  };
  const auto k = static_cast<std::size_t>(neighbors);
  std::vector<Neighbor> best;
  best.reserve(k + 1);

  std::size_t tp = 0, pos = 0, tn = 0, neg = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index fold = i % folds;
    best.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j % folds == fold) continue;
      double d = 0.0;
      for (auto c : columns) {
        const double diff = values(i, static_cast<Eigen::Index>(c)) -
                            values(j, static_cast<Eigen::Index>(c));
        d += diff * diff;
      }
      // Rows arrive in ascending order, so a strict comparison keeps the
      // lower row index first among equal distances.
      if (best.size() == k && !(d < best.back().dist)) continue;
      auto it = std::upper_bound(best.begin(), best.end(), d,
                                 [](double v, const Neighbor& nb) { return v < nb.dist; });
      best.insert(it, Neighbor{d, j});
      if (best.size() > k) best.pop_back();
    }
    std::size_t votes = 0;
    for (const auto& nb : best) votes += labels[static_cast<std::size_t>(nb.row)] == 1;
    const int predicted = 2 * votes >= best.size() && !best.empty() ? 1 : 0;
    const int truth = labels[static_cast<std::size_t>(i)];
    if (truth == 1) {
      ++pos;
      tp += predicted == 1;
    } else {
      ++neg;
      tn += predicted == 0;
    }
  }
  if (pos == 0) return static_cast<double>(tn) / static_cast<double>(neg);
  if (neg == 0) return static_cast<double>(tp) / static_cast<double>(pos);
  return 0.5 * (static_cast<double>(tp) / static_cast<double>(pos) +
                static_cast<double>(tn) / static_cast<double>(neg));
}

SelectedFeatures select_features(const FeatureMatrix& standardized,
                                 std::span<const Outcome> outcomes,
                                 const FeatureSignificance& significance,
                                 std::span<const std::size_t> candidates,
                                 const SelectionConfig& config) {
  if (config.max_features == 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_features must be >= 1");
  }
  if (candidates.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no candidate features to select from");
  }
  const auto n = static_cast<std::size_t>(standardized.rows());
  if (n < 10) {
    throw Error(ErrorCode::kTooFewRows,
                fmt::format("feature selection needs at least 10 rows, got {}", n));
  }
  if (outcomes.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "outcomes do not match rows");
  }
  const auto all_labels = binary_labels(outcomes);

  // Deterministic subsample for large suites.
  const std::size_t stride =
      n > config.max_rows && config.max_rows > 0
          ? (n + config.max_rows - 1) / config.max_rows
          : 1;
  Eigen::MatrixXd values;
  std::vector<int> labels;
  if (stride == 1) {
    values = standardized.values;
    labels = all_labels;
  } else {
    const std::size_t m = (n + stride - 1) / stride;
    values.resize(static_cast<Eigen::Index>(m), standardized.cols());
    for (std::size_t r = 0; r < m; ++r) {
      values.row(static_cast<Eigen::Index>(r)) =
          standardized.values.row(static_cast<Eigen::Index>(r * stride));
      labels.push_back(all_labels[r * stride]);
    }
  }

  SelectedFeatures out;
  std::vector<std::size_t> remaining(candidates.begin(), candidates.end());
  double previous = -std::numeric_limits<double>::infinity();
  while (out.indices.size() < config.max_features && !remaining.empty()) {
    std::size_t best_pos = 0;
    double best_acc = -1.0;
    for (std::size_t pos = 0; pos < remaining.size(); ++pos) {
      auto trial = out.indices;
      trial.push_back(remaining[pos]);
      const double acc = knn_cv_balanced_accuracy(values, labels, trial,
                                                  config.neighbors, config.folds);
      const auto& cand = significance.entries[remaining[pos]];
      const auto& incumbent = significance.entries[remaining[best_pos]];
      const bool better =
          acc > best_acc ||
          (acc == best_acc &&
           (cand.abs_rank < incumbent.abs_rank ||
            (cand.abs_rank == incumbent.abs_rank && remaining[pos] < remaining[best_pos])));
      if (better) {
        best_acc = acc;
        best_pos = pos;
      }
    }
    if (!out.indices.empty() && best_acc - previous < config.min_gain) break;
    out.indices.push_back(remaining[best_pos]);
    out.selection_trace.push_back({remaining[best_pos], best_acc});
    previous = best_acc;
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
  }
  return out;
}

}  // namespace instascope
