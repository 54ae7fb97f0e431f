#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace instascope::stats {

// Population mean / standard deviation.
double mean(std::span<const double> x);
double population_std(std::span<const double> x);

// Pearson correlation; 0 when either input has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> x);

// Pearson correlation of the average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

// R^2 of the least-squares fit target ~ 1 + predictors. Zero-variance
// targets yield 0. Clamped to [0, 1].
double ols_r2(const Eigen::MatrixXd& predictors, const Eigen::VectorXd& target);

}  // namespace instascope::stats
