#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "instascope/diversity.hpp"
#include "instascope/geometry.hpp"
#include "instascope/oracle.hpp"
#include "instascope/pipeline.hpp"
#include "instascope/projection.hpp"
#include "instascope/selection.hpp"
#include "instascope/synthetic.hpp"

namespace {

using namespace instascope;

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

void BM_ConvexHull(benchmark::State& state) {
  const auto pts = to_points(gaussian(state.range(0), 2, 1));
  for (auto _ : state) benchmark::DoNotOptimize(convex_hull(pts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ConvexHull)->RangeMultiplier(10)->Range(100, 100'000)->Complexity();

void BM_LogDet(benchmark::State& state) {
  const auto rows = gaussian(state.range(0), 8, 2);
  const auto kernel = build_kernel(rows, {KernelKind::kRbf, 0.5, 1e-8});
  for (auto _ : state) benchmark::DoNotOptimize(geometric_diversity(kernel));
}
BENCHMARK(BM_LogDet)->RangeMultiplier(4)->Range(64, 1024);

void BM_SelectFeatures(benchmark::State& state) {
  synthetic::SuiteConfig cfg;
  cfg.rows = static_cast<std::size_t>(state.range(0));
  const auto suite = synthetic::scenario_suite(cfg);
  const auto standardized = standardize(feature_matrix(suite));
  std::vector<Outcome> outcomes;
  for (const auto& c : suite.cases) outcomes.push_back(c.outcome);
  const auto sig = feature_significance(standardized, outcomes);
  const auto candidates = drop_redundant(standardized, sig, 0.95);
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_features(standardized, outcomes, sig, candidates));
  }
}
BENCHMARK(BM_SelectFeatures)->Arg(300)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_FitProjection(benchmark::State& state) {
  const auto f = gaussian(state.range(0), 6, 3);
  const Eigen::VectorXd y = (f.col(0).array() > 0.0).cast<double>();
  for (auto _ : state) benchmark::DoNotOptimize(fit_projection(f, y));
}
BENCHMARK(BM_FitProjection)->Arg(300)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_AnalyzeSuite(benchmark::State& state) {
  synthetic::SuiteConfig cfg;
  cfg.rows = static_cast<std::size_t>(state.range(0));
  const auto suite = synthetic::scenario_suite(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(analyze_suite(suite, {}));
}
BENCHMARK(BM_AnalyzeSuite)->Arg(300)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_ActiveLearning(benchmark::State& state) {
  const auto pool = synthetic::separable_pool(static_cast<std::size_t>(state.range(0)), 0);
  ActiveLearningConfig cfg;
  cfg.budget = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_active_learning(pool.features, pool.labels, cfg));
  }
}
BENCHMARK(BM_ActiveLearning)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
