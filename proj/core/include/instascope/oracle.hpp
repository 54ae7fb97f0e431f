#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

// Budgeted oracle learning: a logistic classifier trained on labels obtained
// from a (simulated) teacher, which it queries on the cases it is least sure
// about. Labels are 0/1 with 1 = positive ("biased", or "fail" for
// correctness oracles).
namespace instascope {

struct LogisticConfig {
  double learning_rate = 0.1;
  double l2 = 0.01;
  int epochs = 200;
  double min_step = 1e-6;
};

struct LogisticModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  std::vector<double> loss_trace;  // one entry per accepted epoch

  double probability(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  Eigen::VectorXd probabilities(const Eigen::MatrixXd& x) const;
  std::vector<int> predict(const Eigen::MatrixXd& x) const;
};

struct LossAndGradient {
  double loss = 0.0;
  Eigen::VectorXd grad_weights;
  double grad_bias = 0.0;
};

// Mean log-loss plus (l2 / 2) ||w||^2; the bias is not regularized.
LossAndGradient logistic_loss(const Eigen::MatrixXd& x, std::span<const int> y,
                              const Eigen::VectorXd& weights, double bias,
                              double l2);

// Full-batch gradient descent from zero. An epoch halves its step (starting
// at learning_rate) until the loss decreases; training stops early when
// even min_step fails. Throws Error{kSingleClassLabels}.
LogisticModel train_classifier(const Eigen::MatrixXd& x, std::span<const int> y,
                               const LogisticConfig& config = {});

// Position of the probability closest to 0.5 (ties to the lowest position).
// Throws Error{kEmptyPool}.
std::size_t most_uncertain(std::span<const double> probabilities);

// The entry of `unlabeled` (row indices into `pool`) the model is least sure
// about.
std::size_t uncertainty_query(const LogisticModel& model, const Eigen::MatrixXd& pool,
                              std::span<const std::size_t> unlabeled);

enum class QueryStrategy { kUncertainty, kRandom };

std::string_view strategy_name(QueryStrategy strategy);
QueryStrategy parse_strategy(std::string_view name);

struct ActiveLearningConfig {
  std::size_t budget = 0;
  std::size_t seed_size = 10;
  QueryStrategy strategy = QueryStrategy::kUncertainty;
  double heldout_fraction = 0.3;
  std::uint64_t seed = 0;  // random strategy only
  LogisticConfig model;
};

struct QueryRecord {
  std::size_t index = 0;
  int label = 0;
};

struct LearningPoint {
  std::size_t queries_used = 0;
  double heldout_accuracy = 0.0;
};

struct OracleSession {
  std::vector<std::size_t> heldout_ids;
  std::vector<std::size_t> labeled_ids;    // ascending
  std::vector<std::size_t> unlabeled_ids;  // ascending; excludes held-out rows
  std::size_t budget = 0;
  LogisticModel model;
  std::vector<QueryRecord> query_log;
  std::vector<LearningPoint> curve;  // first point is the seed-set model
};

// Rows with index % floor(1 / heldout_fraction) == 0 are held out. The seed
// set is the first ceil(seed_size / 2) rows of each class among the rest.
// Each round trains, queries one row per the strategy (random draws come
// from std::minstd_rand seeded with `seed`), reveals its label and records
// held-out accuracy, until the budget or the pool runs out.
// Throws Error{kPoolTooSmall} for fewer than 20 rows.
OracleSession simulate_active_learning(const Eigen::MatrixXd& pool,
                                       std::span<const int> truth,
                                       const ActiveLearningConfig& config);

double accuracy(const LogisticModel& model, const Eigen::MatrixXd& x,
                std::span<const int> y, std::span<const std::size_t> rows);

struct Annotation {
  std::string annotator;
  bool biased = false;
};

struct AnnotationSet {
  std::map<std::string, std::vector<Annotation>> cases;  // keyed by test id
};

// JSONL lines {id, annotator, label} with label "biased" | "unbiased".
AnnotationSet parse_annotations_jsonl(std::string_view text);
AnnotationSet load_annotations_jsonl(const std::filesystem::path& path);

// -p ln p - (1 - p) ln (1 - p), with 0 ln 0 = 0.
double binary_entropy(double p);

struct DisagreementEntry {
  std::string id;
  double disagreement = 0.0;
  std::size_t biased = 0;
  std::size_t total = 0;
};

// Top-k cases by label entropy, ties by ascending id.
std::vector<DisagreementEntry> disagreement_ranking(const AnnotationSet& annotations,
                                                    std::size_t k);

// TPR(group A) - TPR(group B), A being the lexicographically smaller of the
// two group ids. Throws Error{kNoPositivesInGroup}.
double equal_opportunity_difference(std::span<const int> predictions,
                                    std::span<const int> truth,
                                    std::span<const std::string> groups);

}  // namespace instascope
