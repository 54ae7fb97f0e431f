#include "commands.hpp"

#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "instascope/error.hpp"
#include "instascope/oracle.hpp"
#include "instascope/report.hpp"
#include "instascope/synthetic.hpp"

namespace instascope::cli {

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  } catch (const std::exception& e) {
    throw StageError(name, Error(ErrorCode::kInvalidArgument, e.what()));
  }
}

// Runs `body`, mapping any library failure to exit code 2.
template <typename Fn>
int guarded(Fn&& body) {
  try {
    body();
    return kExitOk;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kExitPipeline;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitPipeline;
  }
}

TestSuite load_input(const InputOptions& options) {
  auto suite = stage("load", [&] {
    SuiteFormat format = format_from_path(options.input);
    if (options.format) {
      if (*options.format == "csv") {
        format = SuiteFormat::kCsv;
      } else if (*options.format == "json") {
        format = SuiteFormat::kJson;
      } else {
        throw Error(ErrorCode::kInvalidArgument, "format must be csv or json");
      }
    }
    return load_suite(options.input, format);
  });
  if (suite.feature_names.empty() && suite.has_text()) {
    spdlog::info("loaded {} text test cases from {}", suite.size(), options.input.string());
  } else {
    spdlog::info("loaded {} test cases with {} features from {}", suite.size(),
                 suite.feature_names.size(), options.input.string());
  }
  if (options.embeddings) {
    suite = stage("embeddings", [&] {
      const auto vectors = load_embeddings_jsonl(*options.embeddings, suite);
      const auto reduced = reduce_embeddings(vectors, options.embedding_dims);
      if (reduced.rank_deficient) {
        spdlog::warn("embeddings have rank < {}; using {} components", options.embedding_dims,
                     reduced.features.cols());
      }
      TestSuite out = suite;
      for (const auto& name : reduced.features.names) out.feature_names.push_back(name);
      for (std::size_t i = 0; i < out.size(); ++i) {
        for (Eigen::Index j = 0; j < reduced.features.cols(); ++j) {
          out.cases[i].features.push_back(
              reduced.features.values(static_cast<Eigen::Index>(i), j));
        }
      }
      return out;
    });
  }
  return suite;
}

void prepare_out_dir(const std::filesystem::path& dir) {
  stage("emit", [&] {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      throw Error(ErrorCode::kIoError,
                  "cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    return 0;
  });
}

void emit(const std::filesystem::path& path, const std::string& content) {
  stage("emit", [&] {
    write_text_file(path, content);
    return 0;
  });
  spdlog::debug("wrote {}", path.string());
}

void log_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) spdlog::warn("{}", w);
}

}  // namespace

int cmd_analyze(const RunConfig& config) {
  return guarded([&] {
    const auto suite = load_input(config.input);
    prepare_out_dir(config.out_dir);
    const auto analysis = analyze_suite(suite, config.analysis);
    log_warnings(analysis.report.warnings);
    spdlog::info("selected features: {}", fmt::join(analysis.model.selected_names, ", "));
    spdlog::info("instance space area {:.6g}, buggy region {:.6g}, coverage {:.4f}",
                 analysis.report.instance_space_area, analysis.report.buggy_region_area,
                 analysis.report.coverage);

    emit(config.out_dir / "report.json", report_json(analysis.model, analysis.report));
    emit(config.out_dir / "instance_space.csv", instance_space_csv(analysis.space));
    emit(config.out_dir / "plot.svg",
         render_svg(analysis.space, analysis.model.boundary, analysis.report.buggy_hull));
    emit(config.out_dir / "features_hist.csv",
         histograms_csv(analysis.report.per_feature_distributions));
  });
}

int cmd_project(const RunConfig& config) {
  return guarded([&] {
    const auto suite = load_input(config.input);
    prepare_out_dir(config.out_dir);
    const auto model = fit_instance_space(suite, config.analysis);
    log_warnings(model.warnings);
    const auto space = stage("instance-space", [&] { return build_instance_space(model, suite); });
    emit(config.out_dir / "projection.json", projection_json(model));
    emit(config.out_dir / "instance_space.csv", instance_space_csv(space));
  });
}

int cmd_metrics(const RunConfig& config) {
  return guarded([&] {
    const auto suite = load_input(config.input);
    prepare_out_dir(config.out_dir);
    InstanceSpaceModel model;
    if (config.reference) {
      auto ref_options = config.input;
      ref_options.input = *config.reference;
      ref_options.format.reset();
      const auto reference = load_input(ref_options);
      model = fit_instance_space(reference, config.analysis);
    } else {
      model = fit_instance_space(suite, config.analysis);
    }
    const auto report = tisa_metrics(suite, model, config.analysis);
    log_warnings(report.warnings);
    emit(config.out_dir / "report.json", report_json(model, report));
  });
}

int cmd_diversity(const RunConfig& config) {
  return guarded([&] {
    const auto suite = load_input(config.input);
    prepare_out_dir(config.out_dir);
    const auto score = stage("diversity", [&] { return suite_diversity(suite, config.analysis); });
    if (!score.geometric_logdet) {
      spdlog::warn("kernel is singular: the suite contains duplicate-like test cases");
    }
    emit(config.out_dir / "diversity.json", diversity_json(score, config.analysis));
  });
}

int cmd_oracle_sim(const OracleOptions& options) {
  return guarded([&] {
    const auto suite = load_input(options.input);
    prepare_out_dir(options.out_dir);

    // biased -> fail -> 1, unbiased -> pass -> 0; unknown rows are skipped.
    const auto session = stage("oracle", [&] {
      TestSuite labeled = suite;
      std::erase_if(labeled.cases, [](const TestCase& c) { return c.outcome == Outcome::kUnknown; });
      const auto features = standardize(feature_matrix(labeled));
      std::vector<int> truth;
      for (const auto& c : labeled.cases) truth.push_back(c.outcome == Outcome::kEffective);

      ActiveLearningConfig config;
      config.budget = options.budget;
      config.seed_size = options.seed_size;
      config.strategy = parse_strategy(options.strategy);
      config.heldout_fraction = options.heldout_fraction;
      config.seed = options.seed;
      return simulate_active_learning(features.values, truth, config);
    });
    if (!session.curve.empty()) {
      spdlog::info("{} queries, held-out accuracy {:.4f} -> {:.4f}", session.query_log.size(),
                   session.curve.front().heldout_accuracy, session.curve.back().heldout_accuracy);
    }
    emit(options.out_dir / fmt::format("learning_curve_{}.csv", options.strategy),
         learning_curve_csv(session));

    if (options.annotations) {
      const auto ranking = stage("annotations", [&] {
        return disagreement_ranking(load_annotations_jsonl(*options.annotations), options.top_k);
      });
      emit(options.out_dir / "disagreement.csv", disagreement_csv(ranking));
    }
  });
}

int cmd_generate(const GenerateOptions& options) {
  return guarded([&] {
    std::string content;
    if (options.kind == "scenario") {
      synthetic::SuiteConfig config;
      config.rows = options.rows;
      config.dispersion = options.dispersion;
      config.region_center = options.region_center;
      config.region_radius = options.region_radius;
      config.seed = options.seed;
      content = serialize_suite_csv(synthetic::scenario_suite(config));
    } else if (options.kind == "pool") {
      content = serialize_suite_csv(
          synthetic::pool_as_suite(synthetic::separable_pool(options.rows, options.seed)));
    } else {
      throw StageError("generate", Error(ErrorCode::kInvalidArgument,
                                         "kind must be scenario or pool"));
    }
    emit(options.output, content);
  });
}

}  // namespace instascope::cli
