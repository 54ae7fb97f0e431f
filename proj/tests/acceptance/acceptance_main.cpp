// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <sys/wait.h>

#include "instascope/diversity.hpp"
#include "instascope/geometry.hpp"
#include "instascope/oracle.hpp"
#include "instascope/pipeline.hpp"
#include "instascope/projection.hpp"
#include "instascope/stats.hpp"
#include "instascope/synthetic.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace {

using namespace instascope;

struct Outcome_ {
  bool pass = true;
  std::string detail;
};

// Fixtures generated while checking criterion 1, reused for criterion 6.
std::vector<std::pair<InstanceSpace, TisaReport>> g_generated;
bool g_pooled_fit_monotone = false;

bool monotone(const Projection& p) {
  for (std::size_t i = 1; i < p.objective_trace.size(); ++i) {
    if (p.objective_trace[i] > p.objective_trace[i - 1]) return false;
  }
  return !p.objective_trace.empty();
}

synthetic::SuiteConfig correlation_suite_config(int i) {
  synthetic::SuiteConfig cfg;
  cfg.rows = 300;
  cfg.seed = 1000 + static_cast<std::uint64_t>(i);
  cfg.dispersion = 0.4 + 1.2 * i / 29.0;
  cfg.region_center = 2.0;
  cfg.region_radius = 1.5;
  return cfg;
}

Outcome_ criterion_correlation() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<TestSuite> suites;
  TestSuite pooled;
  for (int i = 0; i < 30; ++i) {
    suites.push_back(synthetic::scenario_suite(correlation_suite_config(i)));
    pooled.feature_names = suites.back().feature_names;
    for (auto c : suites.back().cases) {
      c.id = fmt::format("s{:02d}_{}", i, c.id);
      pooled.cases.push_back(std::move(c));
    }
  }
  // One instance space for all suites, so the metrics are comparable.
  const AnalysisConfig cfg;
  const auto model = fit_instance_space(pooled, cfg);
  g_pooled_fit_monotone = monotone(model.projection);
  std::vector<double> faults, buggy, area, coverage;
  for (const auto& suite : suites) {
    const auto space = build_instance_space(model, suite);
    const auto report = space_metrics(space, cfg.tisa);
    faults.push_back(static_cast<double>(
        std::count(space.outcomes.begin(), space.outcomes.end(), Outcome::kEffective)));
    buggy.push_back(report.buggy_region_area);
    area.push_back(report.instance_space_area);
    coverage.push_back(report.coverage);
    g_generated.emplace_back(space, report);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double rb = stats::spearman(faults, buggy);
  const double ra = stats::spearman(faults, area);
  const double rc = stats::spearman(faults, coverage);
  Outcome_ out;
  out.pass = rb > 0.8 && ra > 0.6 && rc > 0.6 && seconds < 60.0;
  out.detail = fmt::format(
      "spearman(faults, buggy_area)={:.3f} (>0.8), instance_area={:.3f} (>0.6), coverage={:.3f} "
      "(>0.6), faults {}..{}, {:.1f}s (<60s)",
      rb, ra, rc, *std::min_element(faults.begin(), faults.end()),
      *std::max_element(faults.begin(), faults.end()), seconds);
  return out;
}

Outcome_ criterion_geometry() {
  std::mt19937_64 rng(2024);
  int hull_mismatch = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<int> count(1, 50);
    const int n = count(rng);
    std::vector<Point> pts(static_cast<std::size_t>(n));
    if (trial % 2 == 0) {
      std::uniform_int_distribution<int> coord(-10, 10);  // ties and collinear runs
      for (auto& p : pts) p = {static_cast<double>(coord(rng)), static_cast<double>(coord(rng))};
    } else {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (auto& p : pts) p = {normal(rng), normal(rng)};
    }
    const auto hull = convex_hull(pts);
    const auto oracle = oracles::brute_force_hull(testutil::to_pts(pts));
    auto got = testutil::to_pts(hull.vertices);
    std::sort(got.begin(), got.end());
    if (oracle.size() < 3 ? polygon_area(hull) != 0.0 : got != oracle) ++hull_mismatch;
  }
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> count(3, 12);
    std::vector<Point> pts(static_cast<std::size_t>(count(rng)));
    for (auto& p : pts) p = {normal(rng) * 2.0, normal(rng)};
    const auto poly = convex_hull(pts);
    if (poly.degenerate()) {
      --trial;
      continue;
    }
    const double mc = oracles::monte_carlo_area(testutil::to_pts(poly.vertices), 1'000'000,
                                                static_cast<std::uint64_t>(trial));
    worst = std::max(worst, std::abs(polygon_area(poly) - mc) / mc);
  }
  return {hull_mismatch == 0 && worst < 0.01,
          fmt::format("hull mismatches {}/1000, worst area error vs Monte-Carlo {:.4f}% (<1%)",
                      hull_mismatch, 100.0 * worst)};
}

Outcome_ criterion_determinant() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  int hadamard = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 5;
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) b(i, j) = normal(rng);
    }
    const Eigen::MatrixXd m = b * b.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
    const auto ld = geometric_diversity(KernelMatrix{m, {}});
    const double det = oracles::cofactor_det(testutil::to_rows(m));
    if (!ld) {
      worst = INFINITY;
      continue;
    }
    worst = std::max(worst, std::abs(std::exp(*ld) - det) / det);
    if (*ld > m.diagonal().array().log().sum() + 1e-12) ++hadamard;
  }
  return {worst <= 1e-9 && hadamard == 0,
          fmt::format("worst relative determinant error {:.2e} (<=1e-9), Hadamard violations {}",
                      worst, hadamard)};
}

Outcome_ criterion_shannon() {
  bool ok = shannon_index<int>(std::vector<int>(17, 4)).h == 0.0;
  double worst = 0.0;
  for (int s = 2; s <= 10; ++s) {
    for (int reps : {1, 3, 25}) {
      std::vector<int> labels;
      for (int r = 0; r < reps; ++r) {
        for (int c = 0; c < s; ++c) labels.push_back(c);
      }
      worst = std::max(worst, std::abs(shannon_index<int>(labels).h - std::log(s)));
    }
  }
  std::mt19937_64 rng(99);
  int perm_fail = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<int> size(1, 80), cat(0, 11);
    std::vector<int> labels(static_cast<std::size_t>(size(rng)));
    for (auto& l : labels) l = cat(rng);
    const auto base = shannon_index<int>(labels);
    std::shuffle(labels.begin(), labels.end(), rng);
    const auto shuffled = shannon_index<int>(labels);
    if (std::abs(base.h - shuffled.h) > 1e-12 || base.richness != shuffled.richness) ++perm_fail;
  }
  return {ok && worst <= 1e-12 && perm_fail == 0,
          fmt::format("single-category H=0 {}, worst |H-ln S| {:.1e} (<=1e-12), permutation "
                      "failures {}/1000",
                      ok ? "yes" : "no", worst, perm_fail)};
}

Outcome_ criterion_projection() {
  const Eigen::MatrixXd z = testutil::gaussian(100, 2, 500);
  const Eigen::MatrixXd b = testutil::gaussian(6, 2, 501);
  const Eigen::MatrixXd f = z * b.transpose();
  const Eigen::VectorXd y = z * Eigen::Vector2d(0.8, -0.5);
  const auto fit = fit_projection(f, y);
  int non_monotone = monotone(fit) ? 0 : 1;
  int fixtures = 1;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int d = 2 + static_cast<int>(seed % 7);
    const auto g = testutil::gaussian(60 + 10 * static_cast<Eigen::Index>(seed % 4), d, seed);
    Eigen::VectorXd label = (g.col(0).array() + 0.3 * g.col(d - 1).array() > 0.2).cast<double>();
    non_monotone += monotone(fit_projection(g, label)) ? 0 : 1;
    ++fixtures;
  }
  non_monotone += g_pooled_fit_monotone ? 0 : 1;
  ++fixtures;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    synthetic::SuiteConfig cfg;
    cfg.seed = 40 + seed;
    non_monotone += monotone(analyze_suite(synthetic::scenario_suite(cfg), {}).model.projection) ? 0 : 1;
    ++fixtures;
  }
  const bool ok = fit.objective() <= 1e-6 && fit.trend_r2_outcome >= 0.999 &&
                  fit.topo_spearman >= 0.95 && non_monotone == 0;
  return {ok, fmt::format("objective {:.2e} (<=1e-6), trend_r2_outcome {:.6f} (>=0.999), "
                          "topo_spearman {:.4f} (>=0.95), non-monotone traces {}/{}",
                          fit.objective(), fit.trend_r2_outcome, fit.topo_spearman, non_monotone,
                          fixtures)};
}

Outcome_ criterion_containment() {
  std::vector<std::pair<InstanceSpace, TisaReport>> fixtures = g_generated;
  const std::string dir = INSTASCOPE_FIXTURES_DIR;
  for (const auto& [file, format] : {std::pair{"/synthetic_suite.csv", SuiteFormat::kCsv},
                                     {"/oracle_pool.csv", SuiteFormat::kCsv},
                                     {"/prompts.json", SuiteFormat::kJson}}) {
    const auto a = analyze_suite(load_suite(dir + file, format), {});
    fixtures.emplace_back(a.space, a.report);
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    synthetic::SuiteConfig cfg;
    cfg.seed = seed;
    cfg.rows = 100 + 40 * seed;
    cfg.dispersion = 0.5 + 0.2 * static_cast<double>(seed);
    const auto a = analyze_suite(synthetic::scenario_suite(cfg), {});
    fixtures.emplace_back(a.space, a.report);
  }
  std::size_t violations = 0, checks = 0;
  for (const auto& [space, report] : fixtures) {
    for (const auto& v : report.buggy_hull.vertices) {
      ++checks;
      violations += !contains(report.instance_hull, v, 1e-9);
    }
    for (const auto& v : report.instance_hull.vertices) {
      ++checks;
      violations += !contains(space.boundary, v, 1e-9);
    }
  }
  return {violations == 0, fmt::format("{} fixtures, {} vertex checks, {} violations",
                                       fixtures.size(), checks, violations)};
}

Outcome_ criterion_gradient() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 10 + trial % 20;
    const auto x = testutil::gaussian(n, 5, 3000 + static_cast<std::uint64_t>(trial));
    std::vector<int> y(static_cast<std::size_t>(n));
    std::bernoulli_distribution coin(0.5);
    for (auto& v : y) v = coin(rng);
    Eigen::VectorXd w(5);
    for (int j = 0; j < 5; ++j) w(j) = normal(rng);
    const double bias = normal(rng);
    const auto lg = logistic_loss(x, y, w, bias, 0.01);
    auto loss_at = [&](const Eigen::VectorXd& ww, double bb) {
      return logistic_loss(x, y, ww, bb, 0.01).loss;
    };
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    for (int j = 0; j < 5; ++j) {
      Eigen::VectorXd wp = w, wm = w;
      wp(j) += h;
      wm(j) -= h;
      const double fd = (loss_at(wp, bias) - loss_at(wm, bias)) / (2 * h);
      worst = std::max(worst, rel(lg.grad_weights(j), fd));
    }
    const double fdb = (loss_at(w, bias + h) - loss_at(w, bias - h)) / (2 * h);
    worst = std::max(worst, rel(lg.grad_bias, fdb));
  }
  return {worst <= 1e-6, fmt::format("worst relative gradient error {:.2e} (<=1e-6)", worst)};
}

ActiveLearningConfig al_config(std::size_t budget, QueryStrategy s, std::uint64_t seed) {
  ActiveLearningConfig c;
  c.budget = budget;
  c.strategy = s;
  c.seed = seed;
  return c;
}

Outcome_ criterion_active_learning() {
  const auto pool = synthetic::separable_pool(200, 0);
  const auto full = simulate_active_learning(pool.features, pool.labels,
                                             al_config(1000, QueryStrategy::kUncertainty, 0));
  const double full_acc = full.curve.back().heldout_accuracy;
  const std::size_t training = full.labeled_ids.size();
  const std::size_t budget = 20;  // 10 seed labels + 20 queries
  const auto unc = simulate_active_learning(pool.features, pool.labels,
                                            al_config(budget, QueryStrategy::kUncertainty, 0));
  const double unc_acc = unc.curve.back().heldout_accuracy;
  const std::size_t labels_used = unc.labeled_ids.size();
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto rnd = simulate_active_learning(pool.features, pool.labels,
                                              al_config(budget, QueryStrategy::kRandom, seed));
    wins += unc_acc > rnd.curve.back().heldout_accuracy;
  }
  const bool ok = unc_acc >= 0.9 * full_acc && 2 * labels_used <= training && wins >= 14;
  return {ok, fmt::format("full-data accuracy {:.4f}, uncertainty {:.4f} with {}/{} labels "
                          "(>=90%, <=50%), beats random in {}/20 seeds (>=14)",
                          full_acc, unc_acc, labels_used, training, wins)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome_ criterion_determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "instascope_acceptance_determinism";
  fs::remove_all(root);
  const std::string cli = INSTASCOPE_CLI_PATH;
  const std::string dir = INSTASCOPE_FIXTURES_DIR;
  auto run = [&](const std::string& args) {
    const std::string cmd = "INSTASCOPE_LOG=error \"" + cli + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  bool ran = true;
  for (const char* tag : {"a", "b"}) {
    ran = run("analyze --input " + dir + "/synthetic_suite.csv --seed 11 --out " +
              (root / tag / "analyze").string()) && ran;
    ran = run("oracle-sim --input " + dir + "/oracle_pool.csv --budget 40 --strategy random "
              "--seed 11 --annotations " + dir + "/annotations.jsonl --out " +
              (root / tag / "oracle").string()) && ran;
    ran = run("oracle-sim --input " + dir + "/oracle_pool.csv --budget 40 --strategy "
              "uncertainty --out " + (root / tag / "oracle").string()) && ran;
  }
  std::size_t files = 0, differing = 0;
  std::string hashes;
  if (ran) {
    for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
      if (!entry.is_regular_file()) continue;
      const auto rel = fs::relative(entry.path(), root / "a");
      const auto ha = std::hash<std::string>{}(slurp(entry.path()));
      const auto hb = std::hash<std::string>{}(slurp(root / "b" / rel));
      ++files;
      differing += ha != hb;
    }
  }
  fs::remove_all(root);
  return {ran && files == 7 && differing == 0,
          fmt::format("runs succeeded {}, {} files hashed, {} differ", ran ? "yes" : "no", files,
                      differing)};
}

Outcome_ criterion_eod() {
  const std::vector<int> truth{1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 0};
  const std::vector<int> pred{1, 1, 1, 0, 1, 1, 1, 1, 0, 0, 0};
  const std::vector<std::string> groups{"A", "A", "A", "A", "A", "B", "B", "B", "B", "B", "B"};
  const double eod = equal_opportunity_difference(pred, truth, groups);
  const std::vector<int> t0{1, 0, 1, 1, 0, 1};
  const std::vector<int> p0{1, 1, 0, 1, 1, 0};
  const std::vector<std::string> g0{"A", "A", "A", "B", "B", "B"};
  const double zero = equal_opportunity_difference(p0, t0, g0);
  std::mt19937_64 rng(10);
  std::bernoulli_distribution coin(0.5);
  int antisym = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> t, p;
    std::vector<std::string> g, s;
    for (int i = 0; i < 24; ++i) {
      t.push_back(i < 2 ? 1 : coin(rng));
      p.push_back(coin(rng));
      g.push_back(i % 2 ? "female" : "male");
      s.push_back(i % 2 ? "male" : "female");
    }
    if (equal_opportunity_difference(p, t, s) != -equal_opportunity_difference(p, t, g)) ++antisym;
  }
  // 0.75 - 0.6 is not exactly 0.15 in binary floating point; compare to the
  // same subtraction.
  const bool ok = eod == 0.75 - 0.6 && zero == 0.0 && antisym == 0;
  return {ok, fmt::format("EOD {:.17g} (0.15), symmetric fixture {}, antisymmetry failures {}/100",
                          eod, zero, antisym)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome_()> run;
  };
  const std::vector<Criterion> criteria{
      {"synthetic correlation analog", criterion_correlation},
      {"geometry oracle equivalence", criterion_geometry},
      {"determinant oracle equivalence", criterion_determinant},
      {"Shannon suite", criterion_shannon},
      {"projection recovery", criterion_projection},
      {"containment chain", criterion_containment},
      {"gradient check", criterion_gradient},
      {"active-learning label efficiency", criterion_active_learning},
      {"determinism", criterion_determinism},
      {"equal opportunity difference", criterion_eod},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome_ result;
    try {
      result = criteria[i].run();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    failed += !result.pass;
    std::printf("%s criterion %zu (%s): %s\n", result.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, result.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
              criteria.size());
  return failed == 0 ? 0 : 1;
}
