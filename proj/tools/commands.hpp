#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "instascope/corpus.hpp"
#include "instascope/pipeline.hpp"

namespace instascope::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPipeline = 2;

struct InputOptions {
  std::filesystem::path input;
  std::optional<std::string> format;  // csv | json; default from extension
  std::optional<std::filesystem::path> embeddings;
  int embedding_dims = 8;
};

struct RunConfig {
  InputOptions input;
  std::filesystem::path out_dir;
  AnalysisConfig analysis;
  std::optional<std::filesystem::path> reference;  // metrics only
};

struct OracleOptions {
  InputOptions input;
  std::filesystem::path out_dir;
  std::size_t budget = 0;
  std::string strategy = "uncertainty";
  std::uint64_t seed = 0;
  std::size_t seed_size = 10;
  double heldout_fraction = 0.3;
  std::optional<std::filesystem::path> annotations;
  std::size_t top_k = 10;
};

struct GenerateOptions {
  std::string kind = "scenario";
  std::filesystem::path output;
  std::size_t rows = 300;
  double dispersion = 1.0;
  double region_center = 1.0;
  double region_radius = 1.2;
  std::uint64_t seed = 0;
};

// Each returns a process exit code (0 ok, 2 pipeline failure).
int cmd_analyze(const RunConfig& config);
int cmd_project(const RunConfig& config);
int cmd_metrics(const RunConfig& config);
int cmd_diversity(const RunConfig& config);
int cmd_oracle_sim(const OracleOptions& options);
int cmd_generate(const GenerateOptions& options);

}  // namespace instascope::cli
