#include "instascope/pipeline.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "instascope/error.hpp"

namespace instascope {

namespace {

template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

FeatureMatrix take_rows(const FeatureMatrix& m, const std::vector<Eigen::Index>& rows) {
  FeatureMatrix out;
  out.names = m.names;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.values.row(static_cast<Eigen::Index>(r)) = m.values.row(rows[r]);
  }
  return out;
}

std::vector<std::size_t> column_indices(const FeatureMatrix& m,
                                        const std::vector<std::string>& names) {
  std::vector<std::size_t> idx;
  idx.reserve(names.size());
  for (const auto& name : names) {
    const auto j = m.index_of(name);
    if (!j) {
      throw Error(ErrorCode::kMissingColumn, fmt::format("suite has no feature '{}'", name));
    }
    idx.push_back(*j);
  }
  return idx;
}

}  // namespace

InstanceSpaceModel fit_instance_space(const TestSuite& suite, const AnalysisConfig& config) {
  InstanceSpaceModel model;
  const auto raw = run_stage("featurize", [&] { return feature_matrix(suite); });
  const auto standardized = run_stage("standardize", [&] { return standardize(raw); });
  model.standardized_names = standardized.names;
  model.dropped_constant_columns = standardized.dropped_constant_columns;

  std::vector<Eigen::Index> known;
  std::vector<Outcome> known_outcomes;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    if (suite.cases[i].outcome != Outcome::kUnknown) {
      known.push_back(static_cast<Eigen::Index>(i));
      known_outcomes.push_back(suite.cases[i].outcome);
    }
  }
  const auto labeled = take_rows(standardized, known);

  model.significance = run_stage("significance", [&] {
    return feature_significance(labeled, known_outcomes);
  });
  model.retained = run_stage("redundancy", [&] {
    return drop_redundant(labeled, model.significance, config.redundancy_threshold);
  });
  model.selection = run_stage("selection", [&] {
    return select_features(labeled, known_outcomes, model.significance, model.retained,
                           config.selection);
  });

  std::vector<std::size_t> chosen = model.selection.indices;
  if (chosen.size() < 2) {
    // The plane needs two axes: top up with the most significant columns,
    // preferring those that survived redundancy pruning.
    auto top_up = [&](bool retained_only) {
      for (auto j : model.significance.by_rank()) {
        if (chosen.size() >= 2) break;
        const bool is_retained =
            std::find(model.retained.begin(), model.retained.end(), j) != model.retained.end();
        if (retained_only && !is_retained) continue;
        if (std::find(chosen.begin(), chosen.end(), j) == chosen.end()) chosen.push_back(j);
      }
    };
    top_up(true);
    top_up(false);
    if (chosen.size() < 2) {
      throw StageError("selection", Error(ErrorCode::kInvalidArgument,
                                          "need at least two non-constant features"));
    }
    model.warnings.push_back(fmt::format(
        "selection kept {} feature(s); padded to 2 by significance",
        model.selection.indices.size()));
  }

  for (auto j : chosen) {
    model.selected_names.push_back(standardized.names[j]);
  }
  const auto d = static_cast<Eigen::Index>(chosen.size());
  model.selected_means.resize(d);
  model.selected_stds.resize(d);
  Eigen::MatrixXd fit_features(static_cast<Eigen::Index>(known.size()), d);
  Eigen::MatrixXd all_features(standardized.rows(), d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const auto j = static_cast<Eigen::Index>(chosen[static_cast<std::size_t>(k)]);
    model.selected_means(k) = standardized.column_means(j);
    model.selected_stds(k) = standardized.column_stds(j);
    fit_features.col(k) = labeled.values.col(j);
    all_features.col(k) = standardized.values.col(j);
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(known.size()));
  for (std::size_t i = 0; i < known_outcomes.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = known_outcomes[i] == Outcome::kEffective ? 1.0 : 0.0;
  }

  // Fallback axes for a degenerate start: selected positions by significance.
  std::vector<std::size_t> axes(chosen.size());
  for (std::size_t k = 0; k < axes.size(); ++k) axes[k] = k;
  std::stable_sort(axes.begin(), axes.end(), [&](std::size_t a, std::size_t b) {
    return model.significance.entries[chosen[a]].abs_rank <
           model.significance.entries[chosen[b]].abs_rank;
  });
  model.projection = run_stage("projection", [&] {
    return fit_projection(fit_features, y, axes, config.projection);
  });
  if (model.projection.degenerate_init) {
    model.warnings.emplace_back("selected features have rank < 2; axis-aligned start used");
  }

  model.ranges = feature_ranges(all_features);
  model.boundary = run_stage("boundary", [&] {
    return estimate_boundary(model.projection.a_matrix, model.ranges, config.seed);
  });
  return model;
}

Eigen::MatrixXd selected_features(const InstanceSpaceModel& model, const TestSuite& suite) {
  const auto raw = feature_matrix(suite);
  const auto columns = column_indices(raw, model.selected_names);
  Eigen::MatrixXd out(raw.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out.col(kk) = (raw.values.col(static_cast<Eigen::Index>(columns[k])).array() -
                   model.selected_means(kk)) /
                  model.selected_stds(kk);
  }
  return out;
}

InstanceSpace build_instance_space(const InstanceSpaceModel& model, const TestSuite& suite) {
  InstanceSpace space;
  space.ids = suite.ids();
  space.outcomes = suite.outcomes();
  space.points = to_points(apply_projection(model.projection, selected_features(model, suite)));
  space.boundary = model.boundary;
  return space;
}

DiversityScore suite_diversity(const TestSuite& suite, const AnalysisConfig& config,
                               const std::vector<std::string>& restrict_to) {
  const auto standardized = standardize(feature_matrix(suite));
  DiversityScore score;
  ShannonIndex shannon;
  if (suite.has_categories()) {
    std::vector<std::string> categories;
    for (const auto& c : suite.cases) categories.push_back(*c.category);
    shannon = shannon_index<std::string>(categories);
  } else {
    const auto labels = kmeans_labels(standardized.values, config.clusters, config.seed);
    shannon = shannon_index<int>(labels);
  }
  score.shannon_h = shannon.h;
  score.richness = shannon.richness;
  score.evenness = shannon.evenness;

  Eigen::MatrixXd rows = standardized.values;
  if (!restrict_to.empty()) {
    std::vector<std::size_t> columns;
    for (const auto& name : restrict_to) {
      if (auto j = standardized.index_of(name)) columns.push_back(*j);
    }
    rows.resize(standardized.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) {
      rows.col(static_cast<Eigen::Index>(k)) =
          standardized.values.col(static_cast<Eigen::Index>(columns[k]));
    }
  }
  score.geometric_logdet = geometric_diversity(build_kernel(rows, config.kernel));
  return score;
}

TisaReport tisa_metrics(const TestSuite& suite, const InstanceSpaceModel& model,
                        const AnalysisConfig& config) {
  const auto space = run_stage("instance-space", [&] { return build_instance_space(model, suite); });
  auto report = run_stage("metrics", [&] { return space_metrics(space, config.tisa); });
  report.diversity = run_stage("diversity", [&] {
    return suite_diversity(suite, config,
                           config.diversity_on_selected ? model.selected_names
                                                        : std::vector<std::string>{});
  });
  report.per_feature_distributions = run_stage("histograms", [&] {
    const auto raw = feature_matrix(suite);
    return feature_histograms(raw, column_indices(raw, model.selected_names), suite.outcomes(),
                              config.histogram_bins);
  });
  report.warnings.insert(report.warnings.begin(), model.warnings.begin(), model.warnings.end());
  return report;
}

Analysis analyze_suite(const TestSuite& suite, const AnalysisConfig& config) {
  Analysis out;
  out.model = fit_instance_space(suite, config);
  out.space = run_stage("instance-space", [&] { return build_instance_space(out.model, suite); });
  out.report = tisa_metrics(suite, out.model, config);
  return out;
}

}  // namespace instascope
