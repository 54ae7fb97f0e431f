#include "instascope/projection.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <fmt/format.h>

#include "instascope/corpus.hpp"
#include "instascope/error.hpp"
#include "instascope/stats.hpp"

namespace instascope {

namespace {

struct BackFit {
  Eigen::MatrixXd b;  // d x 2
  Eigen::Vector2d c;
};

BackFit least_squares_back_fit(const Eigen::MatrixXd& features,
                               const Eigen::VectorXd& outcome,
                               const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd z = features * a.transpose();
  Eigen::MatrixXd targets(features.rows(), features.cols() + 1);
  targets.leftCols(features.cols()) = features;
  targets.col(features.cols()) = outcome;
  const Eigen::MatrixXd w = z.colPivHouseholderQr().solve(targets);  // 2 x (d+1)
  return {w.leftCols(features.cols()).transpose(), w.col(features.cols())};
}

Eigen::MatrixXd initial_map(const Eigen::MatrixXd& features,
                            std::span<const std::size_t> fallback_axes,
                            bool& degenerate) {
  const auto pc = principal_components(features, 2);
  degenerate = pc.rank_deficient;
  if (!degenerate) return pc.loadings.transpose();

  std::size_t first = 0, second = 1;
  if (fallback_axes.size() >= 2) {
    first = fallback_axes[0];
    second = fallback_axes[1];
  }
  const auto d = static_cast<std::size_t>(features.cols());
  if (first >= d || second >= d || first == second) {
    throw Error(ErrorCode::kInvalidArgument, "invalid fallback axes");
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, features.cols());
  a(0, static_cast<Eigen::Index>(first)) = 1.0;
  a(1, static_cast<Eigen::Index>(second)) = 1.0;
  return a;
}

}  // namespace

double projection_objective(const Eigen::MatrixXd& features,
                            const Eigen::VectorXd& outcome,
                            const Eigen::MatrixXd& a_matrix,
                            const Eigen::MatrixXd& b_matrix,
                            const Eigen::Vector2d& c_vector) {
  const Eigen::MatrixXd z = features * a_matrix.transpose();
  return (features - z * b_matrix.transpose()).squaredNorm() +
         (outcome - z * c_vector).squaredNorm();
}

Projection fit_projection(const Eigen::MatrixXd& features,
                          const Eigen::VectorXd& outcome,
                          std::span<const std::size_t> fallback_axes,
                          const ProjectionConfig& config) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (d < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("projection needs at least 2 features, got {}", d));
  }
  if (n < d + 2) {
    throw Error(ErrorCode::kTooFewRows,
                fmt::format("projection needs n >= d + 2 ({} rows, {} features)", n, d));
  }
  if (outcome.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "outcome length does not match rows");
  }

  Projection p;
  p.a_matrix = initial_map(features, fallback_axes, p.degenerate_init);
  auto fit = least_squares_back_fit(features, outcome, p.a_matrix);
  p.b_matrix = fit.b;
  p.c_vector = fit.c;
  double objective =
      projection_objective(features, outcome, p.a_matrix, p.b_matrix, p.c_vector);
  p.objective_trace.push_back(objective);

  const double scale = features.squaredNorm() + outcome.squaredNorm();
  const double floor = 1e-14 * std::max(scale, 1e-300);

  for (int iter = 0; iter < config.max_iterations && objective > floor; ++iter) {
    const Eigen::MatrixXd z = features * p.a_matrix.transpose();
    const Eigen::MatrixXd residual = features - z * p.b_matrix.transpose();
    const Eigen::VectorXd outcome_residual = outcome - z * p.c_vector;
    const Eigen::MatrixXd grad_z =
        -2.0 * (residual * p.b_matrix + outcome_residual * p.c_vector.transpose());
    const Eigen::MatrixXd grad_a = grad_z.transpose() * features;

    bool accepted = false;
    Eigen::MatrixXd candidate;
    double candidate_objective = objective;
    for (double step = config.initial_step; step >= config.min_step; step *= 0.5) {
      candidate = p.a_matrix - step * grad_a;
      candidate_objective =
          projection_objective(features, outcome, candidate, p.b_matrix, p.c_vector);
      if (candidate_objective < objective) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    p.a_matrix = candidate;
    fit = least_squares_back_fit(features, outcome, p.a_matrix);
    const double refit_objective =
        projection_objective(features, outcome, p.a_matrix, fit.b, fit.c);
    if (refit_objective <= candidate_objective) {
      p.b_matrix = fit.b;
      p.c_vector = fit.c;
      candidate_objective = refit_objective;
    }
    const double change = (objective - candidate_objective) / std::max(objective, 1e-300);
    objective = candidate_objective;
    p.objective_trace.push_back(objective);
    p.iterations = iter + 1;
    if (change < config.tolerance) break;
  }

  const auto diag = trend_quality(p, features, outcome);
  p.trend_r2_features = diag.r2_features;
  p.trend_r2_outcome = diag.r2_outcome;
  p.topo_spearman = diag.topo_spearman;
  return p;
}

Eigen::MatrixXd apply_projection(const Projection& projection,
                                 const Eigen::MatrixXd& features) {
  if (features.cols() != projection.dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("projection expects {} features, got {}",
                            projection.dims(), features.cols()));
  }
  return features * projection.a_matrix.transpose();
}

TrendDiagnostics trend_quality(const Projection& projection,
                               const Eigen::MatrixXd& features,
                               const Eigen::VectorXd& outcome) {
  const Eigen::MatrixXd z = apply_projection(projection, features);
  TrendDiagnostics out;
  out.r2_features.resize(features.cols());
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    out.r2_features(j) = stats::ols_r2(z, features.col(j));
  }
  out.r2_outcome = stats::ols_r2(z, outcome);

  const Eigen::Index n = features.rows();
  const Eigen::Index stride = n > 500 ? (n + 499) / 500 : 1;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < n; i += stride) rows.push_back(i);
  std::vector<double> high, low;
  high.reserve(rows.size() * (rows.size() - 1) / 2);
  low.reserve(high.capacity());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      high.push_back((features.row(rows[a]) - features.row(rows[b])).norm());
      low.push_back((z.row(rows[a]) - z.row(rows[b])).norm());
    }
  }
  out.topo_spearman = high.size() < 2 ? 1.0 : stats::spearman(high, low);
  return out;
}

}  // namespace instascope
