#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "instascope/geometry.hpp"
#include "instascope/oracle.hpp"
#include "instascope/pipeline.hpp"
#include "instascope/tisa.hpp"

namespace instascope {

// Rounds to `digits` significant decimal digits (via "%.{digits}g").
double round_significant(double value, int digits = 9);

// report.json: areas, coverage, grid, diversity, selected features and the
// projection. Numbers carry at most 9 significant digits.
std::string report_json(const InstanceSpaceModel& model, const TisaReport& report);
std::string projection_json(const InstanceSpaceModel& model);
std::string diversity_json(const DiversityScore& score, const AnalysisConfig& config);

// `id,x,y,outcome` with 6-decimal fixed coordinates.
std::string instance_space_csv(const InstanceSpace& space);
// `feature,bin,lower,upper,effective,ineffective`.
std::string histograms_csv(const std::vector<FeatureHistogram>& histograms);
// `queries,accuracy`.
std::string learning_curve_csv(const OracleSession& session);
// `id,disagreement,biased,total`.
std::string disagreement_csv(const std::vector<DisagreementEntry>& entries);

// 800 x 600 scatter of the instance space: one circle per instance in row
// order (failing and passing in distinct colors), then the boundary path and
// the buggy-region path. The buggy path is omitted when it has < 2 vertices.
std::string render_svg(const InstanceSpace& space, const Polygon& boundary,
                       const Polygon& buggy);

void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace instascope
