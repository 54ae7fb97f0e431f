#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "instascope/error.hpp"
#include "instascope/oracle.hpp"
#include "instascope/synthetic.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace instascope {
namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an instascope::Error";
  return ErrorCode::kInvalidArgument;
}

TEST(TrainClassifier, OneDimensionalSeparable) {
  const Eigen::MatrixXd x = (Eigen::MatrixXd(6, 1) << -1, -1, -1, 1, 1, 1).finished();
  const std::vector<int> y{0, 0, 0, 1, 1, 1};
  const auto m = train_classifier(x, y);
  EXPECT_GT(m.weights(0), 0.0);
  EXPECT_EQ(m.predict(x), y);
}

TEST(TrainClassifier, SingleClassRejected) {
  const Eigen::MatrixXd x = testutil::gaussian(5, 2, 1);
  const std::vector<int> y(5, 1);
  EXPECT_EQ(code_of([&] { train_classifier(x, y); }), ErrorCode::kSingleClassLabels);
}

TEST(TrainClassifier, LossNonIncreasing) {
  const auto x = testutil::gaussian(80, 5, 2);
  std::vector<int> y(80);
  for (int i = 0; i < 80; ++i) y[static_cast<std::size_t>(i)] = x(i, 0) - x(i, 3) > 0.1;
  const auto m = train_classifier(x, y);
  ASSERT_FALSE(m.loss_trace.empty());
  for (std::size_t i = 1; i < m.loss_trace.size(); ++i) {
    EXPECT_LE(m.loss_trace[i], m.loss_trace[i - 1]);
  }
  EXPECT_TRUE(m.weights.allFinite());
}

TEST(LogisticLoss, MatchesOracleAndFiniteDifferences) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = testutil::gaussian(15, 5, static_cast<std::uint64_t>(trial));
    std::vector<int> y(15);
    for (int i = 0; i < 15; ++i) y[static_cast<std::size_t>(i)] = (i + trial) % 3 == 0;
    Eigen::VectorXd w(5);
    for (int j = 0; j < 5; ++j) w(j) = normal(rng);
    const double b = normal(rng);
    const auto lg = logistic_loss(x, y, w, b, 0.01);
    const auto rows = testutil::to_rows(x);
    EXPECT_NEAR(lg.loss, oracles::logistic_loss(rows, y, testutil::to_vec(w), b, 0.01), 1e-12);
    for (int j = 0; j < 5; ++j) {
      auto wp = testutil::to_vec(w), wm = testutil::to_vec(w);
      wp[static_cast<std::size_t>(j)] += h;
      wm[static_cast<std::size_t>(j)] -= h;
      const double fd = (oracles::logistic_loss(rows, y, wp, b, 0.01) -
                         oracles::logistic_loss(rows, y, wm, b, 0.01)) / (2 * h);
      EXPECT_LE(std::abs(lg.grad_weights(j) - fd), 1e-6 * std::max(1.0, std::abs(fd)));
    }
    const double fdb = (oracles::logistic_loss(rows, y, testutil::to_vec(w), b + h, 0.01) -
                        oracles::logistic_loss(rows, y, testutil::to_vec(w), b - h, 0.01)) / (2 * h);
    EXPECT_LE(std::abs(lg.grad_bias - fdb), 1e-6 * std::max(1.0, std::abs(fdb)));
  }
}

TEST(MostUncertain, ClosestToHalf) {
  EXPECT_EQ(most_uncertain(std::vector<double>{0.9, 0.55, 0.2}), 1u);
  EXPECT_EQ(most_uncertain(std::vector<double>{0.3, 0.3, 0.3}), 0u);
  EXPECT_EQ(most_uncertain(std::vector<double>{0.6, 0.4}), 0u);
  EXPECT_EQ(code_of([] { most_uncertain(std::vector<double>{}); }), ErrorCode::kEmptyPool);
}

TEST(UncertaintyQuery, MidpointOfTwoClustersFirst) {
  Eigen::MatrixXd pool(9, 2);
  pool << -2, -2, -2.1, -1.9, -1.9, -2.1, -2, -2.2,  //
      2, 2, 2.1, 1.9, 1.9, 2.1, 2, 2.2,              //
      0.05, -0.02;
  const std::vector<int> y{0, 0, 0, 0, 1, 1, 1, 1};
  const auto model = train_classifier(pool.topRows(8), y);
  std::vector<std::size_t> unlabeled{0, 2, 4, 6, 8};
  EXPECT_EQ(uncertainty_query(model, pool, unlabeled), 8u);

  // Same answer computed directly from the trained weights.
  std::size_t best = 0;
  double best_gap = 2.0;
  for (auto i : unlabeled) {
    const double z = model.bias + pool.row(static_cast<Eigen::Index>(i)).dot(model.weights);
    const double gap = std::abs(1.0 / (1.0 + std::exp(-z)) - 0.5);
    if (gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  EXPECT_EQ(best, 8u);
}

ActiveLearningConfig config_for(std::size_t budget, QueryStrategy s, std::uint64_t seed = 0) {
  ActiveLearningConfig c;
  c.budget = budget;
  c.strategy = s;
  c.seed = seed;
  return c;
}

TEST(ActiveLearning, SplitAndInvariants) {
  const auto pool = synthetic::separable_pool(100, 3);
  for (auto strategy : {QueryStrategy::kUncertainty, QueryStrategy::kRandom}) {
    const auto s = simulate_active_learning(pool.features, pool.labels, config_for(15, strategy, 4));
    for (auto i : s.heldout_ids) EXPECT_EQ(i % 3, 0u);
    EXPECT_EQ(s.heldout_ids.size(), 34u);
    EXPECT_EQ(s.query_log.size(), 15u);
    EXPECT_EQ(s.labeled_ids.size(), 25u);  // budget + seed size
    std::set<std::size_t> all(s.labeled_ids.begin(), s.labeled_ids.end());
    for (auto i : s.unlabeled_ids) EXPECT_TRUE(all.insert(i).second);
    EXPECT_EQ(all.size(), 66u);
    for (auto i : s.heldout_ids) EXPECT_FALSE(all.count(i));
    for (const auto& q : s.query_log) EXPECT_EQ(q.label, pool.labels[q.index]);
    ASSERT_EQ(s.curve.size(), 16u);
    for (std::size_t k = 1; k < s.curve.size(); ++k) {
      EXPECT_GT(s.curve[k].queries_used, s.curve[k - 1].queries_used);
      EXPECT_GE(s.curve[k].heldout_accuracy, 0.0);
      EXPECT_LE(s.curve[k].heldout_accuracy, 1.0);
    }
  }
}

TEST(ActiveLearning, SeedSetIsFirstOfEachClass) {
  const auto pool = synthetic::separable_pool(60, 8);
  const auto s = simulate_active_learning(pool.features, pool.labels,
                                          config_for(1, QueryStrategy::kUncertainty));
  std::vector<std::size_t> expected;
  std::size_t pos = 0, neg = 0;
  for (std::size_t i = 0; i < 60; ++i) {
    if (i % 3 == 0) continue;
    auto& count = pool.labels[i] == 1 ? pos : neg;
    if (count < 5) {
      expected.push_back(i);
      ++count;
    }
  }
  expected.push_back(s.query_log[0].index);
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(s.labeled_ids, expected);
}

TEST(ActiveLearning, ExhaustedBudgetEqualsFullTraining) {
  const auto pool = synthetic::separable_pool(60, 5);
  const auto unc = simulate_active_learning(pool.features, pool.labels,
                                            config_for(1000, QueryStrategy::kUncertainty));
  const auto rnd = simulate_active_learning(pool.features, pool.labels,
                                            config_for(1000, QueryStrategy::kRandom, 9));
  EXPECT_EQ(unc.labeled_ids.size(), 40u);
  EXPECT_TRUE(unc.unlabeled_ids.empty());
  EXPECT_EQ(unc.labeled_ids, rnd.labeled_ids);
  EXPECT_EQ(unc.model.weights, rnd.model.weights);

  // Direct training on every non-held-out row gives the same model.
  Eigen::MatrixXd x(40, pool.features.cols());
  std::vector<int> y;
  for (std::size_t k = 0; k < unc.labeled_ids.size(); ++k) {
    x.row(static_cast<Eigen::Index>(k)) = pool.features.row(static_cast<Eigen::Index>(unc.labeled_ids[k]));
    y.push_back(pool.labels[unc.labeled_ids[k]]);
  }
  const auto direct = train_classifier(x, y);
  EXPECT_EQ(direct.weights, unc.model.weights);
  EXPECT_EQ(direct.bias, unc.model.bias);
  EXPECT_EQ(unc.curve.back().heldout_accuracy,
            accuracy(direct, pool.features, pool.labels, unc.heldout_ids));
}

TEST(ActiveLearning, DeterministicQueryLog) {
  const auto pool = synthetic::separable_pool(120, 2);
  for (auto strategy : {QueryStrategy::kUncertainty, QueryStrategy::kRandom}) {
    const auto a = simulate_active_learning(pool.features, pool.labels, config_for(20, strategy, 5));
    const auto b = simulate_active_learning(pool.features, pool.labels, config_for(20, strategy, 5));
    ASSERT_EQ(a.query_log.size(), b.query_log.size());
    for (std::size_t k = 0; k < a.query_log.size(); ++k) {
      EXPECT_EQ(a.query_log[k].index, b.query_log[k].index);
    }
    EXPECT_EQ(a.model.weights, b.model.weights);
  }
}

TEST(ActiveLearning, PoolTooSmall) {
  const auto pool = synthetic::separable_pool(19, 1);
  EXPECT_EQ(code_of([&] {
              simulate_active_learning(pool.features, pool.labels,
                                       config_for(5, QueryStrategy::kUncertainty));
            }),
            ErrorCode::kPoolTooSmall);
}

TEST(ActiveLearning, UncertaintyReachesNinetyPercentWithHalfTheLabels) {
  const auto pool = synthetic::separable_pool(200, 0);
  const auto full = simulate_active_learning(pool.features, pool.labels,
                                             config_for(1000, QueryStrategy::kUncertainty));
  const double full_acc = full.curve.back().heldout_accuracy;
  const std::size_t training = full.labeled_ids.size();
  const auto s = simulate_active_learning(pool.features, pool.labels,
                                          config_for(training / 2 - 10, QueryStrategy::kUncertainty));
  EXPECT_LE(s.labeled_ids.size(), training / 2);
  EXPECT_GE(s.curve.back().heldout_accuracy, 0.9 * full_acc);
}

TEST(Disagreement, EntropyValues) {
  EXPECT_NEAR(binary_entropy(0.5), std::log(2.0), 1e-15);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.75), -(0.75 * std::log(0.75) + 0.25 * std::log(0.25)), 1e-15);
  EXPECT_NEAR(binary_entropy(0.75), 0.562335145, 1e-9);
}

TEST(Disagreement, RankingAndTies) {
  const auto set = parse_annotations_jsonl(R"({"id":"c","annotator":"a1","label":"biased"}
{"id":"c","annotator":"a2","label":"biased"}
{"id":"c","annotator":"a3","label":"unbiased"}
{"id":"c","annotator":"a4","label":"unbiased"}
{"id":"b","annotator":"a1","label":"biased"}
{"id":"b","annotator":"a2","label":"biased"}
{"id":"b","annotator":"a3","label":"biased"}
{"id":"b","annotator":"a4","label":"unbiased"}
{"id":"a","annotator":"a1","label":"unbiased"}
{"id":"a","annotator":"a2","label":"unbiased"}
{"id":"d","annotator":"a1","label":"unbiased"}
{"id":"d","annotator":"a2","label":"biased"}
)");
  const auto top = disagreement_ranking(set, 10);
  ASSERT_EQ(top.size(), 4u);
  EXPECT_EQ(top[0].id, "c");
  EXPECT_NEAR(top[0].disagreement, std::log(2.0), 1e-15);
  EXPECT_EQ(top[1].id, "d");  // tied with c at ln 2; ascending id puts c first
  EXPECT_EQ(top[2].id, "b");
  EXPECT_NEAR(top[2].disagreement, 0.562335145, 1e-9);
  EXPECT_EQ(top[3].id, "a");
  EXPECT_EQ(top[3].disagreement, 0.0);
  EXPECT_EQ(disagreement_ranking(set, 2).size(), 2u);
}

TEST(Disagreement, AnnotatorPermutationAndLabelSwap) {
  std::mt19937_64 rng(6);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 50; ++trial) {
    AnnotationSet set, swapped, shuffled;
    for (int c = 0; c < 8; ++c) {
      const std::string id = "case" + std::to_string(c);
      for (int a = 0; a < 5; ++a) {
        const Annotation ann{"ann" + std::to_string(a), coin(rng)};
        set.cases[id].push_back(ann);
        swapped.cases[id].push_back({ann.annotator, !ann.biased});
      }
      shuffled.cases[id] = set.cases[id];
      std::shuffle(shuffled.cases[id].begin(), shuffled.cases[id].end(), rng);
    }
    const auto base = disagreement_ranking(set, 8);
    const auto sw = disagreement_ranking(swapped, 8);
    const auto sh = disagreement_ranking(shuffled, 8);
    for (std::size_t k = 0; k < base.size(); ++k) {
      EXPECT_EQ(base[k].id, sw[k].id);
      EXPECT_NEAR(base[k].disagreement, sw[k].disagreement, 1e-15);
      EXPECT_EQ(base[k].id, sh[k].id);
      EXPECT_EQ(base[k].disagreement, sh[k].disagreement);
    }
  }
}

TEST(Disagreement, BadLabelRejected) {
  EXPECT_THROW(parse_annotations_jsonl(R"({"id":"a","annotator":"x","label":"maybe"})"), Error);
}

TEST(Eod, HandCountedTables) {
  // Group A: 4 positives, 3 predicted positive. Group B: 5 positives, 3
  // predicted positive. Negatives are irrelevant to TPR.
  const std::vector<int> truth{1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 0};
  const std::vector<int> pred{1, 1, 1, 0, 1, 1, 1, 1, 0, 0, 0};
  const std::vector<std::string> groups{"A", "A", "A", "A", "A", "B", "B", "B", "B", "B", "B"};
  EXPECT_NEAR(equal_opportunity_difference(pred, truth, groups), 0.15, 1e-15);

  const std::vector<int> t2{1, 1, 0, 1, 1, 0};
  const std::vector<int> p2{1, 0, 1, 1, 0, 0};
  const std::vector<std::string> g2{"x", "x", "x", "y", "y", "y"};
  EXPECT_EQ(equal_opportunity_difference(p2, t2, g2), 0.0);
}

TEST(Eod, NoPositivesInGroup) {
  const std::vector<int> truth{1, 0, 0};
  const std::vector<int> pred{1, 1, 0};
  const std::vector<std::string> groups{"A", "B", "B"};
  EXPECT_EQ(code_of([&] { equal_opportunity_difference(pred, truth, groups); }),
            ErrorCode::kNoPositivesInGroup);
}

TEST(Eod, GroupSwapNegatesExactly) {
  std::mt19937_64 rng(10);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> truth, pred;
    std::vector<std::string> groups, swapped;
    for (int i = 0; i < 30; ++i) {
      const bool a = i % 2 == 0;
      truth.push_back(i < 4 ? 1 : coin(rng));
      pred.push_back(coin(rng));
      groups.push_back(a ? "g1" : "g2");
      swapped.push_back(a ? "g2" : "g1");
    }
    const double eod = equal_opportunity_difference(pred, truth, groups);
    EXPECT_EQ(equal_opportunity_difference(pred, truth, swapped), -eod);
    EXPECT_GE(eod, -1.0);
    EXPECT_LE(eod, 1.0);
  }
}

}  // namespace
}  // namespace instascope
