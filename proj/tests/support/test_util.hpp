#pragma once

#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "instascope/corpus.hpp"
#include "instascope/geometry.hpp"
#include "oracles.hpp"

namespace testutil {

inline oracles::Matrix to_rows(const Eigen::MatrixXd& m) {
  oracles::Matrix rows(static_cast<std::size_t>(m.rows()),
                       std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    }
  }
  return rows;
}

inline std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

inline std::vector<oracles::Pt> to_pts(std::span<const instascope::Point> pts) {
  std::vector<oracles::Pt> out;
  for (const auto& p : pts) out.push_back({p.x, p.y});
  return out;
}

inline Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

inline instascope::FeatureMatrix named(const Eigen::MatrixXd& values) {
  instascope::FeatureMatrix m;
  for (Eigen::Index j = 0; j < values.cols(); ++j) m.names.push_back("c" + std::to_string(j));
  m.values = values;
  return m;
}

inline std::vector<instascope::Outcome> outcomes_from(const std::vector<int>& y) {
  std::vector<instascope::Outcome> out;
  for (int v : y) {
    out.push_back(v == 1 ? instascope::Outcome::kEffective : instascope::Outcome::kIneffective);
  }
  return out;
}

}  // namespace testutil
