#include "instascope/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/QR>

#include "instascope/error.hpp"

namespace instascope::stats {

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double population_std(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "pearson: length mismatch");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double ols_r2(const Eigen::MatrixXd& predictors, const Eigen::VectorXd& target) {
  const Eigen::Index n = target.size();
  if (predictors.rows() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "ols_r2: row count mismatch");
  }
  const double ybar = target.mean();
  const double ss_tot = (target.array() - ybar).square().sum();
  if (!(ss_tot > 0.0)) return 0.0;
  Eigen::MatrixXd design(n, predictors.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(predictors.cols()) = predictors;
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(target);
  const double ss_res = (target - design * coef).squaredNorm();
  return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

}  // namespace instascope::stats
