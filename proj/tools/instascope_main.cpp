// instascope: test-suite adequacy analytics over a 2D instance space.

#include <cstdlib>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace {

using instascope::cli::GenerateOptions;
using instascope::cli::InputOptions;
using instascope::cli::OracleOptions;
using instascope::cli::RunConfig;

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("instascope");
  logger->set_pattern("%^%l%$: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("INSTASCOPE_LOG")) {
    const std::string level = env;
    if (level == "error") {
      spdlog::set_level(spdlog::level::err);
    } else if (level == "debug") {
      spdlog::set_level(spdlog::level::debug);
    } else if (level != "info") {
      spdlog::warn("ignoring INSTASCOPE_LOG='{}' (expected error|info|debug)", level);
    }
  }
}

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input", in.input, "Test suite file (CSV or JSON)")->required();
  cmd->add_option("--format", in.format, "Input format; default from the file extension")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--embeddings", in.embeddings,
                  "JSONL embeddings {id, vector}; PCA components become features");
  cmd->add_option("--embedding-dims", in.embedding_dims, "PCA components kept from embeddings")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void add_analysis_options(CLI::App* cmd, RunConfig& cfg, std::string& kernel) {
  auto& a = cfg.analysis;
  cmd->add_option("--features-k", a.selection.max_features, "Maximum selected features")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--redundancy-threshold", a.redundancy_threshold,
                  "|Pearson| above which the less significant feature is dropped")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--min-gain", a.selection.min_gain,
                  "Minimum balanced-accuracy gain to add another feature")
      ->capture_default_str();
  cmd->add_option("--grid", a.tisa.grid_cells, "Coverage grid cells per axis")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--prune-outliers", a.tisa.prune_outliers,
                "Drop kNN outliers before taking the buggy-region hull");
  cmd->add_option("--prune-k", a.tisa.prune_k, "Neighbour rank used by --prune-outliers")
      ->capture_default_str();
  cmd->add_option("--kernel", kernel, "Diversity kernel")
      ->capture_default_str()
      ->check(CLI::IsMember({"linear", "rbf"}));
  cmd->add_option("--gamma", a.kernel.gamma, "RBF kernel width")->capture_default_str();
  cmd->add_option("--epsilon", a.kernel.epsilon, "Kernel diagonal ridge")->capture_default_str();
  cmd->add_option("--clusters", a.clusters, "k-means categories for the Shannon index")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--diversity-on-selected", a.diversity_on_selected,
                "Compute geometric diversity on the selected features only");
  cmd->add_option("--seed", a.seed, "Seed for k-means seeding and boundary sampling")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"instascope: instance-space adequacy metrics for test suites"};
  app.require_subcommand(1);

  RunConfig analyze_cfg, project_cfg, metrics_cfg, diversity_cfg;
  std::string analyze_kernel = "linear", project_kernel = "linear", metrics_kernel = "linear",
              diversity_kernel = "linear";

  auto* analyze = app.add_subcommand(
      "analyze", "Full pipeline: report.json, instance_space.csv, plot.svg, features_hist.csv");
  add_input_options(analyze, analyze_cfg.input);
  add_analysis_options(analyze, analyze_cfg, analyze_kernel);
  analyze->add_option("--out", analyze_cfg.out_dir, "Output directory")->required();

  auto* project = app.add_subcommand("project", "Fit the 2D projection: projection.json, "
                                                "instance_space.csv");
  add_input_options(project, project_cfg.input);
  add_analysis_options(project, project_cfg, project_kernel);
  project->add_option("--out", project_cfg.out_dir, "Output directory")->required();

  auto* metrics = app.add_subcommand(
      "metrics", "TISA metrics (report.json), optionally in a space fitted on --reference");
  add_input_options(metrics, metrics_cfg.input);
  add_analysis_options(metrics, metrics_cfg, metrics_kernel);
  metrics->add_option("--reference", metrics_cfg.reference,
                      "Suite used to fit the instance space (default: --input)");
  metrics->add_option("--out", metrics_cfg.out_dir, "Output directory")->required();

  auto* diversity = app.add_subcommand("diversity", "Shannon and geometric diversity: "
                                                    "diversity.json");
  add_input_options(diversity, diversity_cfg.input);
  add_analysis_options(diversity, diversity_cfg, diversity_kernel);
  diversity->add_option("--out", diversity_cfg.out_dir, "Output directory")->required();

  OracleOptions oracle;
  auto* oracle_sim = app.add_subcommand(
      "oracle-sim", "Simulate budgeted oracle learning: learning_curve_<strategy>.csv");
  add_input_options(oracle_sim, oracle.input);
  oracle_sim->add_option("--budget", oracle.budget, "Maximum teacher queries")
      ->required()
      ->check(CLI::PositiveNumber);
  oracle_sim->add_option("--strategy", oracle.strategy, "Query strategy")
      ->capture_default_str()
      ->check(CLI::IsMember({"uncertainty", "random"}));
  oracle_sim->add_option("--seed", oracle.seed, "Seed of the random strategy")
      ->capture_default_str();
  oracle_sim->add_option("--seed-size", oracle.seed_size, "Initial labeled set size")
      ->capture_default_str();
  oracle_sim->add_option("--heldout", oracle.heldout_fraction, "Held-out fraction")
      ->capture_default_str()
      ->check(CLI::Range(0.01, 0.5));
  oracle_sim->add_option("--annotations", oracle.annotations,
                         "Multi-annotator JSONL {id, annotator, label}");
  oracle_sim->add_option("--top-k", oracle.top_k, "Cases listed in disagreement.csv")
      ->capture_default_str();
  oracle_sim->add_option("--out", oracle.out_dir, "Output directory")->required();

  GenerateOptions generate;
  auto* gen = app.add_subcommand("generate", "Write a seeded synthetic suite CSV");
  gen->add_option("--kind", generate.kind, "scenario (planted failure region) or pool "
                                           "(separable oracle pool)")
      ->capture_default_str()
      ->check(CLI::IsMember({"scenario", "pool"}));
  gen->add_option("--rows", generate.rows, "Number of test cases")->capture_default_str();
  gen->add_option("--dispersion", generate.dispersion, "Feature standard deviation (scenario)")
      ->capture_default_str();
  gen->add_option("--region-center", generate.region_center,
                  "Failure disc centre on both right_turns and curvature (scenario)")
      ->capture_default_str();
  gen->add_option("--region-radius", generate.region_radius, "Failure disc radius (scenario)")
      ->capture_default_str();
  gen->add_option("--seed", generate.seed, "Generator seed")->capture_default_str();
  gen->add_option("--output", generate.output, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : instascope::cli::kExitUsage;
  }

  namespace cli = instascope::cli;
  auto with_kernel = [](RunConfig& cfg, const std::string& kernel) -> RunConfig& {
    cfg.analysis.kernel.kind = instascope::parse_kernel_kind(kernel);
    return cfg;
  };
  if (analyze->parsed()) return cli::cmd_analyze(with_kernel(analyze_cfg, analyze_kernel));
  if (project->parsed()) return cli::cmd_project(with_kernel(project_cfg, project_kernel));
  if (metrics->parsed()) return cli::cmd_metrics(with_kernel(metrics_cfg, metrics_kernel));
  if (diversity->parsed()) {
    return cli::cmd_diversity(with_kernel(diversity_cfg, diversity_kernel));
  }
  if (oracle_sim->parsed()) return cli::cmd_oracle_sim(oracle);
  if (gen->parsed()) return cli::cmd_generate(generate);
  return cli::kExitUsage;
}
