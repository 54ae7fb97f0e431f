#include "instascope/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <fmt/format.h>

namespace instascope {

ShannonIndex shannon_from_counts(std::vector<std::size_t> counts) {
  std::erase(counts, std::size_t{0});
  if (counts.empty()) {
    throw Error(ErrorCode::kEmptyInput, "shannon_index: no categories");
  }
  // Summing in count order makes the result independent of category names.
  std::sort(counts.begin(), counts.end());
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);

  ShannonIndex out;
  out.richness = counts.size();
  for (auto c : counts) {
    const double p = static_cast<double>(c) / total;
    out.h -= p * std::log(p);
  }
  if (out.richness == 1) {
    out.h = 0.0;
    out.evenness = 1.0;
  } else {
    out.h = std::max(out.h, 0.0);
    out.evenness = std::clamp(out.h / std::log(static_cast<double>(out.richness)),
                              0.0, 1.0);
  }
  return out;
}

std::string_view kernel_name(KernelKind kind) {
  return kind == KernelKind::kLinear ? "linear" : "rbf";
}

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "linear") return KernelKind::kLinear;
  if (name == "rbf") return KernelKind::kRbf;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown kernel '{}' (expected linear|rbf)", name));
}

KernelMatrix build_kernel(const Eigen::MatrixXd& rows, const KernelSpec& spec) {
  const Eigen::Index n = rows.rows();
  if (n < 1) throw Error(ErrorCode::kEmptyInput, "build_kernel: no rows");
  if (spec.epsilon < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "kernel epsilon must be >= 0");
  }
  KernelMatrix k;
  k.spec = spec;
  k.values.resize(n, n);
  if (spec.kind == KernelKind::kLinear) {
    Eigen::MatrixXd unit = rows;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double norm = rows.row(i).norm();
      if (!(norm > 0.0)) {
        throw Error(ErrorCode::kZeroNormRow,
                    fmt::format("row {} has zero norm", i));
      }
      unit.row(i) /= norm;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      k.values(i, i) = 1.0 + spec.epsilon;
      for (Eigen::Index j = 0; j < i; ++j) {
        const double v = unit.row(i).dot(unit.row(j));
        k.values(i, j) = v;
        k.values(j, i) = v;
      }
    }
  } else {
    if (spec.gamma < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "rbf gamma must be >= 0");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      k.values(i, i) = 1.0 + spec.epsilon;
      for (Eigen::Index j = 0; j < i; ++j) {
        const double v = std::exp(-spec.gamma * (rows.row(i) - rows.row(j)).squaredNorm());
        k.values(i, j) = v;
        k.values(j, i) = v;
      }
    }
  }
  return k;
}

std::optional<double> log_det_cholesky(const Eigen::MatrixXd& kernel) {
  const Eigen::Index n = kernel.rows();
  if (kernel.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "kernel must be square");
  }
  constexpr double kPivotFloor = 1e-12;
  const Eigen::LLT<Eigen::MatrixXd> llt(kernel);
  if (llt.info() != Eigen::Success) return std::nullopt;
  // Pivots are the squared diagonal of L; the floor rejects near-singular
  // kernels the factorization itself would accept.
  const Eigen::VectorXd pivots = llt.matrixLLT().diagonal().array().square();
  if (n > 0 && !(pivots.minCoeff() > kPivotFloor)) return std::nullopt;
  return pivots.array().log().sum();
}

std::optional<double> geometric_diversity(const KernelMatrix& kernel) {
  return log_det_cholesky(kernel.values);
}

std::vector<int> kmeans_labels(const Eigen::MatrixXd& rows, int k,
                               std::uint64_t seed, int max_iterations) {
  const Eigen::Index n = rows.rows();
  if (n < 1) throw Error(ErrorCode::kEmptyInput, "kmeans: no rows");
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "kmeans: k must be >= 1");

  std::vector<Eigen::Index> seeds{static_cast<Eigen::Index>(seed % static_cast<std::uint64_t>(n))};
  Eigen::VectorXd nearest = (rows.rowwise() - rows.row(seeds[0])).rowwise().squaredNorm();
  while (static_cast<int>(seeds.size()) < k) {
    Eigen::Index far = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (nearest(i) > nearest(far)) far = i;
    }
    if (!(nearest(far) > 0.0)) break;
    seeds.push_back(far);
    nearest = nearest.cwiseMin((rows.rowwise() - rows.row(far)).rowwise().squaredNorm());
  }

  const auto clusters = static_cast<Eigen::Index>(seeds.size());
  Eigen::MatrixXd centers(clusters, rows.cols());
  for (Eigen::Index c = 0; c < clusters; ++c) centers.row(c) = rows.row(seeds[static_cast<std::size_t>(c)]);

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < clusters; ++c) {
        const double d = (rows.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(clusters, rows.cols());
    std::vector<int> sizes(static_cast<std::size_t>(clusters), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = labels[static_cast<std::size_t>(i)];
      sums.row(c) += rows.row(i);
      ++sizes[static_cast<std::size_t>(c)];
    }
    for (Eigen::Index c = 0; c < clusters; ++c) {
      // Empty clusters keep their previous center.
      if (sizes[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / sizes[static_cast<std::size_t>(c)];
      }
    }
  }
  return labels;
}

}  // namespace instascope
