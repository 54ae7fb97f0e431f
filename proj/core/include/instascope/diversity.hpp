#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "instascope/error.hpp"

namespace instascope {

struct ShannonIndex {
  double h = 0.0;             // nats
  std::size_t richness = 0;   // distinct categories S
  double evenness = 1.0;      // H / ln S, 1 when S == 1
};

// Shannon index from per-category counts (zero counts are ignored).
// Throws Error{kEmptyInput} when all counts are zero.
ShannonIndex shannon_from_counts(std::vector<std::size_t> counts);

template <typename Label>
ShannonIndex shannon_index(std::span<const Label> categories) {
  if (categories.empty()) {
    throw Error(ErrorCode::kEmptyInput, "shannon_index: no categories");
  }
  std::map<Label, std::size_t> counts;
  for (const auto& c : categories) ++counts[c];
  std::vector<std::size_t> values;
  values.reserve(counts.size());
  for (const auto& [_, n] : counts) values.push_back(n);
  return shannon_from_counts(std::move(values));
}

enum class KernelKind { kLinear, kRbf };

std::string_view kernel_name(KernelKind kind);
// "linear" or "rbf"; throws Error{kInvalidArgument}.
KernelKind parse_kernel_kind(std::string_view name);

struct KernelSpec {
  KernelKind kind = KernelKind::kLinear;
  double gamma = 1.0;     // rbf only
  double epsilon = 1e-8;  // ridge added to the diagonal
};

struct KernelMatrix {
  Eigen::MatrixXd values;
  KernelSpec spec;

  Eigen::Index size() const { return values.rows(); }
};

// Linear: unit-normalize each row, then K = X X^T + eps I.
// Rbf:    K_ij = exp(-gamma ||x_i - x_j||^2) + eps [i == j].
// Throws Error{kZeroNormRow} for a zero row under the linear kind.
KernelMatrix build_kernel(const Eigen::MatrixXd& rows, const KernelSpec& spec);

// Natural-log determinant via Cholesky. Returns nullopt (the degenerate
// result, log det = -inf) as soon as a pivot is <= 1e-12.
std::optional<double> log_det_cholesky(const Eigen::MatrixXd& kernel);

// DPP-style geometric diversity: log det of the kernel.
std::optional<double> geometric_diversity(const KernelMatrix& kernel);

// Lloyd's k-means with farthest-point seeding: the first center is row
// (seed mod n); each further center is the row farthest from the chosen
// ones (ties to the lowest row). Returns one label in [0, k) per row.
// Fewer than k clusters are used when there are fewer distinct rows.
std::vector<int> kmeans_labels(const Eigen::MatrixXd& rows, int k,
                               std::uint64_t seed, int max_iterations = 100);

struct DiversityScore {
  double shannon_h = 0.0;
  std::size_t richness = 0;
  double evenness = 1.0;
  std::optional<double> geometric_logdet;  // nullopt: degenerate kernel
};

}  // namespace instascope
