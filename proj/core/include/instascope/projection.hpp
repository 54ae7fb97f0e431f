#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace instascope {

// Linear instance-space generator. Coordinates are Z = F A^T; B and c are
// the least-squares back-fits of the features and the outcome from Z.
struct Projection {
  Eigen::MatrixXd a_matrix;  // 2 x d
  Eigen::MatrixXd b_matrix;  // d x 2
  Eigen::Vector2d c_vector = Eigen::Vector2d::Zero();
  std::vector<double> objective_trace;
  Eigen::VectorXd trend_r2_features;
  double trend_r2_outcome = 0.0;
  double topo_spearman = 0.0;
  bool degenerate_init = false;
  int iterations = 0;

  Eigen::Index dims() const { return a_matrix.cols(); }
  double objective() const {
    return objective_trace.empty() ? 0.0 : objective_trace.back();
  }
};

struct ProjectionConfig {
  int max_iterations = 500;
  double tolerance = 1e-8;     // relative objective change
  double initial_step = 1e-2;  // line search starts here each iteration
  double min_step = 1e-20;
};

// J(A, B, c) = ||F - Z B^T||_F^2 + ||y - Z c||^2 with Z = F A^T.
double projection_objective(const Eigen::MatrixXd& features,
                            const Eigen::VectorXd& outcome,
                            const Eigen::MatrixXd& a_matrix,
                            const Eigen::MatrixXd& b_matrix,
                            const Eigen::Vector2d& c_vector);

// Alternating minimization of J: B and c by least squares given Z, then a
// gradient step on A with a halving backtracking line search. A starts from
// the top two principal directions of F. When F has rank < 2 the start is
// axis-aligned on `fallback_axes` (first two used; default columns 0 and 1)
// and degenerate_init is set. Requires n >= d + 2 and d >= 2.
// The trend diagnostics are filled in before returning.
Projection fit_projection(const Eigen::MatrixXd& features,
                          const Eigen::VectorXd& outcome,
                          std::span<const std::size_t> fallback_axes = {},
                          const ProjectionConfig& config = {});

// n x 2 coordinates; throws Error{kDimensionMismatch} on a column mismatch.
Eigen::MatrixXd apply_projection(const Projection& projection,
                                 const Eigen::MatrixXd& features);

struct TrendDiagnostics {
  Eigen::VectorXd r2_features;
  double r2_outcome = 0.0;
  double topo_spearman = 0.0;
};

// Per-feature and outcome R^2 of OLS fits on the 2D coordinates, plus the
// Spearman correlation between pairwise distances in feature space and in
// the plane (every ceil(n/500)-th row when n > 500).
TrendDiagnostics trend_quality(const Projection& projection,
                               const Eigen::MatrixXd& features,
                               const Eigen::VectorXd& outcome);

}  // namespace instascope
