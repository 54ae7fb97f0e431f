#include "instascope/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"
#include "instascope/error.hpp"

namespace instascope {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

void check_shapes(const Eigen::MatrixXd& x, std::span<const int> y) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("{} labels for {} rows", y.size(), x.rows()));
  }
  for (int v : y) {
    if (v != 0 && v != 1) {
      throw Error(ErrorCode::kInvalidArgument, "labels must be 0 or 1");
    }
  }
}

double loss_only(const Eigen::MatrixXd& x, std::span<const int> y,
                 const Eigen::VectorXd& w, double b, double l2) {
  const Eigen::VectorXd z = (x * w).array() + b;
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    total += softplus(z(i)) - y[static_cast<std::size_t>(i)] * z(i);
  }
  return total / static_cast<double>(z.size()) + 0.5 * l2 * w.squaredNorm();
}

}  // namespace

double LogisticModel::probability(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  return sigmoid(x.dot(weights) + bias);
}

Eigen::VectorXd LogisticModel::probabilities(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd z = (x * weights).array() + bias;
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = sigmoid(z(i));
  return z;
}

std::vector<int> LogisticModel::predict(const Eigen::MatrixXd& x) const {
  const auto p = probabilities(x);
  std::vector<int> out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p(i) >= 0.5;
  return out;
}

LossAndGradient logistic_loss(const Eigen::MatrixXd& x, std::span<const int> y,
                              const Eigen::VectorXd& weights, double bias, double l2) {
  check_shapes(x, y);
  if (x.rows() == 0) throw Error(ErrorCode::kEmptyInput, "no training rows");
  const Eigen::VectorXd z = (x * weights).array() + bias;
  Eigen::VectorXd residual(z.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const int yi = y[static_cast<std::size_t>(i)];
    total += softplus(z(i)) - yi * z(i);
    residual(i) = sigmoid(z(i)) - yi;
  }
  const auto n = static_cast<double>(z.size());
  LossAndGradient out;
  out.loss = total / n + 0.5 * l2 * weights.squaredNorm();
  out.grad_weights = x.transpose() * residual / n + l2 * weights;
  out.grad_bias = residual.sum() / n;
  return out;
}

LogisticModel train_classifier(const Eigen::MatrixXd& x, std::span<const int> y,
                               const LogisticConfig& config) {
  check_shapes(x, y);
  const auto positives = std::count(y.begin(), y.end(), 1);
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(y.size())) {
    throw Error(ErrorCode::kSingleClassLabels, "training labels contain a single class");
  }
  LogisticModel model;
  model.weights = Eigen::VectorXd::Zero(x.cols());
  auto current = logistic_loss(x, y, model.weights, model.bias, config.l2);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    bool accepted = false;
    for (double step = config.learning_rate; step >= config.min_step; step *= 0.5) {
      const Eigen::VectorXd w = model.weights - step * current.grad_weights;
      const double b = model.bias - step * current.grad_bias;
      if (loss_only(x, y, w, b, config.l2) < current.loss) {
        model.weights = w;
        model.bias = b;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    current = logistic_loss(x, y, model.weights, model.bias, config.l2);
    model.loss_trace.push_back(current.loss);
  }
  return model;
}

std::size_t most_uncertain(std::span<const double> probabilities) {
  if (probabilities.empty()) throw Error(ErrorCode::kEmptyPool, "no unlabeled candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < probabilities.size(); ++i) {
    if (std::abs(probabilities[i] - 0.5) < std::abs(probabilities[best] - 0.5)) best = i;
  }
  return best;
}

std::size_t uncertainty_query(const LogisticModel& model, const Eigen::MatrixXd& pool,
                              std::span<const std::size_t> unlabeled) {
  std::vector<double> probs;
  probs.reserve(unlabeled.size());
  for (auto i : unlabeled) probs.push_back(model.probability(pool.row(static_cast<Eigen::Index>(i))));
  return unlabeled[most_uncertain(probs)];
}

std::string_view strategy_name(QueryStrategy strategy) {
  return strategy == QueryStrategy::kUncertainty ? "uncertainty" : "random";
}

QueryStrategy parse_strategy(std::string_view name) {
  if (name == "uncertainty") return QueryStrategy::kUncertainty;
  if (name == "random") return QueryStrategy::kRandom;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown strategy '{}' (expected uncertainty|random)", name));
}

double accuracy(const LogisticModel& model, const Eigen::MatrixXd& x,
                std::span<const int> y, std::span<const std::size_t> rows) {
  if (rows.empty()) return 0.0;
  std::size_t correct = 0;
  for (auto i : rows) {
    const int predicted = model.probability(x.row(static_cast<Eigen::Index>(i))) >= 0.5;
    correct += predicted == y[i];
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

OracleSession simulate_active_learning(const Eigen::MatrixXd& pool,
                                       std::span<const int> truth,
                                       const ActiveLearningConfig& config) {
  check_shapes(pool, truth);
  const auto n = static_cast<std::size_t>(pool.rows());
  if (n < 20) {
    throw Error(ErrorCode::kPoolTooSmall, fmt::format("pool has {} rows, need >= 20", n));
  }
  if (config.budget < 1) throw Error(ErrorCode::kInvalidArgument, "budget must be >= 1");
  if (!(config.heldout_fraction > 0.0 && config.heldout_fraction <= 0.5)) {
    throw Error(ErrorCode::kInvalidArgument, "heldout fraction must be in (0, 0.5]");
  }

  OracleSession session;
  session.budget = config.budget;
  const auto every = static_cast<std::size_t>(std::floor(1.0 / config.heldout_fraction));
  std::vector<std::size_t> training;
  for (std::size_t i = 0; i < n; ++i) {
    (i % every == 0 ? session.heldout_ids : training).push_back(i);
  }

  const std::size_t per_class = (config.seed_size + 1) / 2;
  std::size_t taken[2] = {0, 0};
  for (auto i : training) {
    const int label = truth[i];
    if (taken[label] < per_class) {
      ++taken[label];
      session.labeled_ids.push_back(i);
    } else {
      session.unlabeled_ids.push_back(i);
    }
  }

  auto retrain = [&] {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(session.labeled_ids.size()), pool.cols());
    std::vector<int> y;
    y.reserve(session.labeled_ids.size());
    for (std::size_t r = 0; r < session.labeled_ids.size(); ++r) {
      x.row(static_cast<Eigen::Index>(r)) = pool.row(static_cast<Eigen::Index>(session.labeled_ids[r]));
      y.push_back(truth[session.labeled_ids[r]]);
    }
    session.model = train_classifier(x, y, config.model);
    session.curve.push_back(
        {session.query_log.size(), accuracy(session.model, pool, truth, session.heldout_ids)});
  };

  std::minstd_rand rng(static_cast<std::minstd_rand::result_type>(config.seed));
  retrain();
  while (session.query_log.size() < config.budget && !session.unlabeled_ids.empty()) {
    std::size_t chosen = 0;
    if (config.strategy == QueryStrategy::kUncertainty) {
      chosen = uncertainty_query(session.model, pool, session.unlabeled_ids);
    } else {
      chosen = session.unlabeled_ids[rng() % session.unlabeled_ids.size()];
    }
    // The simulated teacher answers from ground truth.
    session.query_log.push_back({chosen, truth[chosen]});
    std::erase(session.unlabeled_ids, chosen);
    session.labeled_ids.insert(
        std::lower_bound(session.labeled_ids.begin(), session.labeled_ids.end(), chosen),
        chosen);
    retrain();
  }
  return session;
}

AnnotationSet parse_annotations_jsonl(std::string_view text) {
  AnnotationSet out;
  std::istringstream lines{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("line {}: {}", line_no, e.what()));
    }
    for (const char* key : {"id", "annotator", "label"}) {
      if (!obj.contains(key) || !obj.at(key).is_string()) {
        throw Error(ErrorCode::kMissingColumn,
                    fmt::format("line {}: missing string field '{}'", line_no, key));
      }
    }
    const auto label = obj.at("label").get<std::string>();
    if (label != "biased" && label != "unbiased") {
      throw Error(ErrorCode::kUnknownOutcomeToken,
                  fmt::format("line {}: label '{}' is not biased|unbiased", line_no, label));
    }
    out.cases[obj.at("id").get<std::string>()].push_back(
        {obj.at("annotator").get<std::string>(), label == "biased"});
  }
  return out;
}

AnnotationSet load_annotations_jsonl(const std::filesystem::path& path) {
  return parse_annotations_jsonl(detail::read_file(path));
}

double binary_entropy(double p) {
  auto term = [](double v) { return v > 0.0 ? -v * std::log(v) : 0.0; };
  return term(p) + term(1.0 - p);
}

std::vector<DisagreementEntry> disagreement_ranking(const AnnotationSet& annotations,
                                                    std::size_t k) {
  std::vector<DisagreementEntry> entries;
  for (const auto& [id, labels] : annotations.cases) {
    if (labels.empty()) {
      throw Error(ErrorCode::kEmptyInput, fmt::format("case '{}' has no annotations", id));
    }
    DisagreementEntry e;
    e.id = id;
    e.total = labels.size();
    e.biased = static_cast<std::size_t>(
        std::count_if(labels.begin(), labels.end(), [](const Annotation& a) { return a.biased; }));
    // Entropy is symmetric in p, so evaluate at the minority share.
    const std::size_t minority = std::min(e.biased, e.total - e.biased);
    e.disagreement =
        binary_entropy(static_cast<double>(minority) / static_cast<double>(e.total));
    entries.push_back(std::move(e));
  }
  // The map is ordered by id, so a stable sort keeps ascending ids on ties.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.disagreement > b.disagreement; });
  if (entries.size() > k) entries.resize(k);
  return entries;
}

double equal_opportunity_difference(std::span<const int> predictions,
                                    std::span<const int> truth,
                                    std::span<const std::string> groups) {
  if (predictions.size() != truth.size() || truth.size() != groups.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "EOD inputs differ in length");
  }
  const std::set<std::string> ids(groups.begin(), groups.end());
  if (ids.size() != 2) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("EOD needs exactly two groups, got {}", ids.size()));
  }
  auto tpr = [&](const std::string& group) {
    std::size_t positives = 0, hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (groups[i] != group || truth[i] != 1) continue;
      ++positives;
      hits += predictions[i] == 1;
    }
    if (positives == 0) {
      throw Error(ErrorCode::kNoPositivesInGroup,
                  fmt::format("group '{}' has no ground-truth positives", group));
    }
    return static_cast<double>(hits) / static_cast<double>(positives);
  };
  return tpr(*ids.begin()) - tpr(*ids.rbegin());
}

}  // namespace instascope
