#include "instascope/synthetic.hpp"

#include <random>

#include <fmt/format.h>

namespace instascope::synthetic {

namespace {

const Eigen::Matrix<double, 5, 1> kPlaneNormal =
    (Eigen::Matrix<double, 5, 1>() << 1.0, 0.6, -0.4, 0.2, 0.1).finished();
constexpr double kPlaneOffset = 0.3;

}  // namespace

bool in_failure_region(const SuiteConfig& config, double right_turns, double curvature) {
  const double dx = right_turns - config.region_center;
  const double dy = curvature - config.region_center;
  return dx * dx + dy * dy < config.region_radius * config.region_radius;
}

TestSuite scenario_suite(const SuiteConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  TestSuite suite;
  suite.feature_names = {"right_turns", "curvature",  "pedestrians", "lanes",
                         "speed_limit", "left_turns", "weather",     "map_version"};
  suite.cases.reserve(config.rows);
  for (std::size_t i = 0; i < config.rows; ++i) {
    TestCase tc;
    tc.id = fmt::format("t{:04d}", i);
    const double s = config.dispersion;
    const double right_turns = s * normal(rng);
    const double curvature = s * normal(rng);
    const double pedestrians = s * normal(rng);
    const double lanes = s * normal(rng);
    const double speed_limit = s * normal(rng);
    const double left_turns = right_turns + 0.05 * s * normal(rng);
    const double weather = s * normal(rng);
    tc.features = {right_turns, curvature,  pedestrians, lanes,
                   speed_limit, left_turns, weather,     3.0};
    tc.outcome = in_failure_region(config, right_turns, curvature) ? Outcome::kEffective
                                                                   : Outcome::kIneffective;
    suite.cases.push_back(std::move(tc));
  }
  return suite;
}

LabeledPool separable_pool(std::size_t rows, std::uint64_t seed, double margin) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  LabeledPool pool;
  pool.features.resize(static_cast<Eigen::Index>(rows), 5);
  pool.labels.reserve(rows);
  const double norm = kPlaneNormal.norm();
  std::size_t filled = 0;
  while (filled < rows) {
    Eigen::Matrix<double, 5, 1> x;
    for (int j = 0; j < 5; ++j) x(j) = uniform(rng);
    const double signed_distance = (kPlaneNormal.dot(x) - kPlaneOffset) / norm;
    if (std::abs(signed_distance) < margin) continue;
    pool.features.row(static_cast<Eigen::Index>(filled)) = x.transpose();
    pool.labels.push_back(signed_distance > 0.0 ? 1 : 0);
    ++filled;
  }
  return pool;
}

TestSuite pool_as_suite(const LabeledPool& pool) {
  TestSuite suite;
  for (Eigen::Index j = 0; j < pool.features.cols(); ++j) {
    suite.feature_names.push_back(fmt::format("x{}", j + 1));
  }
  for (Eigen::Index i = 0; i < pool.features.rows(); ++i) {
    TestCase tc;
    tc.id = fmt::format("p{:04d}", i);
    tc.outcome = pool.labels[static_cast<std::size_t>(i)] == 1 ? Outcome::kEffective
                                                              : Outcome::kIneffective;
    for (Eigen::Index j = 0; j < pool.features.cols(); ++j) {
      tc.features.push_back(pool.features(i, j));
    }
    suite.cases.push_back(std::move(tc));
  }
  return suite;
}

}  // namespace instascope::synthetic
