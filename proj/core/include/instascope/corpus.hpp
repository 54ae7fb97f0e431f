#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace instascope {

// Performance-space label of a test case. A failing test is "effective"
// because it reveals incorrect behaviour of the system under test.
enum class Outcome : std::uint8_t { kEffective, kIneffective, kUnknown };

// "fail" / "pass" / "unknown".
std::string_view outcome_token(Outcome outcome);
// Inverse of outcome_token (case-insensitive, surrounding blanks ignored).
// Throws Error{kUnknownOutcomeToken}.
Outcome parse_outcome(std::string_view token);

struct TestCase {
  std::string id;
  std::optional<std::string> raw_text;
  std::vector<double> features;
  Outcome outcome = Outcome::kUnknown;
  // User-declared categorical label; used for the Shannon index when present.
  std::optional<std::string> category;
};

struct TestSuite {
  // Feature names without the `f_` column prefix used on disk.
  std::vector<std::string> feature_names;
  std::vector<TestCase> cases;

  std::size_t size() const { return cases.size(); }
  bool has_text() const;
  bool has_categories() const;
  std::vector<Outcome> outcomes() const;
  std::vector<std::string> ids() const;
};

// Checks the structural invariants (unique non-empty ids, feature row
// lengths). Throws Error on the first violation.
void validate(const TestSuite& suite);

enum class SuiteFormat { kCsv, kJson };

// Picks the format from the file extension (".json" -> kJson, else kCsv).
SuiteFormat format_from_path(const std::filesystem::path& path);

TestSuite load_suite(const std::filesystem::path& path, SuiteFormat format);
TestSuite parse_suite_csv(std::string_view text);
TestSuite parse_suite_json(std::string_view text);

// Doubles are written in shortest round-trip form, so parse(serialize(s))
// reproduces `s` exactly.
std::string serialize_suite_csv(const TestSuite& suite);
std::string serialize_suite_json(const TestSuite& suite);

struct FeatureMatrix {
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // n x d
  // Statistics used to standardize the retained columns; empty when the
  // matrix holds raw values.
  Eigen::VectorXd column_means;
  Eigen::VectorXd column_stds;
  std::vector<std::string> dropped_constant_columns;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  // Position of `name` in `names`, if any.
  std::optional<std::size_t> index_of(std::string_view name) const;
};

// Raw feature matrix of the suite. Text-only suites are featurized with the
// surface features of featurize_text.
FeatureMatrix feature_matrix(const TestSuite& suite);

struct TextFeatureConfig {
  // Fold ASCII case before counting distinct token types.
  bool case_fold_types = false;
};

// Surface features per text, in this order: char_length (code points),
// token_count (whitespace tokens), type_token_ratio, mean_token_length,
// punctuation_density, digit_density. Throws Error{kEmptyCorpus}.
FeatureMatrix featurize_text(std::span<const std::string> texts,
                             const TextFeatureConfig& config = {});

struct PrincipalComponents {
  Eigen::VectorXd mean;                // column means removed before fitting
  Eigen::MatrixXd loadings;            // m x k, unit columns
  Eigen::VectorXd explained_variance;  // k, non-increasing (population)
  Eigen::MatrixXd scores;              // n x k
  bool rank_deficient = false;
};

// Top-k principal components from the eigendecomposition of the population
// covariance. Each component's largest-magnitude loading is made positive.
// If fewer than k eigenvalues are nonzero, only those are returned and
// `rank_deficient` is set.
PrincipalComponents principal_components(const Eigen::MatrixXd& data, int k);

struct ReducedEmbeddings {
  FeatureMatrix features;  // columns pc_1..pc_k
  Eigen::VectorXd explained_variance;
  bool rank_deficient = false;
};

// Requires 1 <= k <= min(n - 1, m) and finite input.
ReducedEmbeddings reduce_embeddings(const Eigen::MatrixXd& embeddings, int k);

// Reads `{id, vector:[...]}` lines and returns them as rows aligned with the
// order of `suite`. Every suite id must be present exactly once.
Eigen::MatrixXd load_embeddings_jsonl(const std::filesystem::path& path,
                                      const TestSuite& suite);

// Z-scores every column with the population standard deviation. Columns with
// zero variance are dropped and listed in dropped_constant_columns.
// Throws Error{kAllColumnsConstant} when nothing is left, and
// Error{kInvalidArgument} for fewer than two rows.
FeatureMatrix standardize(const FeatureMatrix& matrix);

}  // namespace instascope
