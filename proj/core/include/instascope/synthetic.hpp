#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "instascope/corpus.hpp"

// Seeded fixture generators used by the acceptance suite, the benchmarks and
// the `generate` CLI subcommand.
namespace instascope::synthetic {

// Scenario-style suite with 8 features: right_turns, curvature, pedestrians,
// lanes, speed_limit, left_turns, weather, map_version. Features are normal
// with standard deviation `dispersion` (map_version is constant).
// left_turns tracks right_turns closely. A test fails when
// (right_turns, curvature) falls inside the disc of radius `region_radius`
// centered at (region_center, region_center).
struct SuiteConfig {
  std::size_t rows = 300;
  double dispersion = 1.0;
  double region_center = 1.0;
  double region_radius = 1.2;
  std::uint64_t seed = 0;
};

TestSuite scenario_suite(const SuiteConfig& config);

// Whether a raw (right_turns, curvature) pair lies in the failure region.
bool in_failure_region(const SuiteConfig& config, double right_turns, double curvature);

struct LabeledPool {
  Eigen::MatrixXd features;
  std::vector<int> labels;
};

// Linearly separable pool in [-1, 1]^5: label = [w.x > 0.3] for a fixed w,
// with every point at least `margin` away from the separating plane.
LabeledPool separable_pool(std::size_t rows, std::uint64_t seed, double margin = 0.05);

// The pool as a suite (label 1 -> "fail", i.e. biased), features f_x1..f_x5.
TestSuite pool_as_suite(const LabeledPool& pool);

}  // namespace instascope::synthetic
