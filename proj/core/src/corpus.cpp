#include "instascope/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"
#include "instascope/error.hpp"

namespace instascope {

namespace {

constexpr std::string_view kFeaturePrefix = "f_";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

void check_unique_ids(const TestSuite& suite) {
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < suite.cases.size(); ++i) {
    const auto& id = suite.cases[i].id;
    if (id.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("row {} has an empty id", i + 1));
    }
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  fmt::format("duplicate id '{}' at row {}", id, i + 1));
    }
  }
}

// Counts UTF-8 code points; continuation bytes are 10xxxxxx.
std::size_t code_points(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

std::vector<std::string_view> whitespace_tokens(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) tokens.push_back(s.substr(start, i - start));
  }
  return tokens;
}

}  // namespace

std::string_view outcome_token(Outcome outcome) {
  switch (outcome) {
    case Outcome::kEffective:
      return "fail";
    case Outcome::kIneffective:
      return "pass";
    case Outcome::kUnknown:
      return "unknown";
  }
  return "unknown";
}

Outcome parse_outcome(std::string_view token) {
  std::string lower(trim(token));
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "fail") return Outcome::kEffective;
  if (lower == "pass") return Outcome::kIneffective;
  if (lower == "unknown") return Outcome::kUnknown;
  throw Error(ErrorCode::kUnknownOutcomeToken,
              fmt::format("unknown outcome token '{}'", token));
}

bool TestSuite::has_text() const {
  return !cases.empty() && std::all_of(cases.begin(), cases.end(), [](auto& c) {
    return c.raw_text.has_value();
  });
}

bool TestSuite::has_categories() const {
  return !cases.empty() && std::all_of(cases.begin(), cases.end(), [](auto& c) {
    return c.category.has_value();
  });
}

std::vector<Outcome> TestSuite::outcomes() const {
  std::vector<Outcome> out;
  out.reserve(cases.size());
  for (const auto& c : cases) out.push_back(c.outcome);
  return out;
}

std::vector<std::string> TestSuite::ids() const {
  std::vector<std::string> out;
  out.reserve(cases.size());
  for (const auto& c : cases) out.push_back(c.id);
  return out;
}

void validate(const TestSuite& suite) {
  check_unique_ids(suite);
  std::unordered_set<std::string_view> names;
  for (const auto& name : suite.feature_names) {
    if (!names.insert(name).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("duplicate feature name '{}'", name));
    }
  }
  for (const auto& c : suite.cases) {
    if (c.features.size() != suite.feature_names.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  fmt::format("test case '{}' has {} features, expected {}",
                              c.id, c.features.size(),
                              suite.feature_names.size()));
    }
  }
}

SuiteFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".json" ? SuiteFormat::kJson : SuiteFormat::kCsv;
}

TestSuite load_suite(const std::filesystem::path& path, SuiteFormat format) {
  const std::string text = detail::read_file(path);
  return format == SuiteFormat::kJson ? parse_suite_json(text)
                                      : parse_suite_csv(text);
}

TestSuite parse_suite_csv(std::string_view text) {
  const auto rows = detail::parse_csv(text);
  if (rows.empty()) {
    throw Error(ErrorCode::kMissingColumn, "CSV has no header row");
  }
  const auto& header = rows.front();

  std::optional<std::size_t> id_col, outcome_col, text_col, category_col;
  std::vector<std::size_t> feature_cols;
  TestSuite suite;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string_view name = trim(header[c]);
    if (name == "id") {
      id_col = c;
    } else if (name == "outcome") {
      outcome_col = c;
    } else if (name == "text") {
      text_col = c;
    } else if (name == "category") {
      category_col = c;
    } else if (name.starts_with(kFeaturePrefix) &&
               name.size() > kFeaturePrefix.size()) {
      feature_cols.push_back(c);
      suite.feature_names.emplace_back(name.substr(kFeaturePrefix.size()));
    }
  }
  if (!id_col) throw Error(ErrorCode::kMissingColumn, "missing column 'id'");
  if (!outcome_col) {
    throw Error(ErrorCode::kMissingColumn, "missing column 'outcome'");
  }
  if (feature_cols.empty() && !text_col) {
    throw Error(ErrorCode::kMissingColumn,
                "missing feature columns: need at least one 'f_*' or 'text'");
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw Error(ErrorCode::kMissingColumn,
                  fmt::format("row {} has {} fields, header has {}", r,
                              row.size(), header.size()));
    }
    TestCase tc;
    tc.id = std::string(trim(row[*id_col]));
    try {
      tc.outcome = parse_outcome(row[*outcome_col]);
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("row {} ('{}'), column 'outcome': {}", r,
                                        tc.id, e.what()));
    }
    if (text_col) tc.raw_text = row[*text_col];
    if (category_col) tc.category = std::string(trim(row[*category_col]));
    tc.features.reserve(feature_cols.size());
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const auto value = parse_double(row[feature_cols[k]]);
      if (!value) {
        throw Error(ErrorCode::kNonNumericFeature,
                    fmt::format("row {} ('{}'), column '{}': '{}' is not a finite "
                                "number",
                                r, tc.id, header[feature_cols[k]],
                                row[feature_cols[k]]));
      }
      tc.features.push_back(*value);
    }
    suite.cases.push_back(std::move(tc));
  }
  validate(suite);
  return suite;
}

TestSuite parse_suite_json(std::string_view text) {
  using Json = nlohmann::ordered_json;
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("malformed suite JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw Error(ErrorCode::kInvalidArgument,
                "suite JSON must be an array of test cases");
  }

  TestSuite suite;
  bool names_known = false;
  for (std::size_t r = 0; r < doc.size(); ++r) {
    const auto& obj = doc[r];
    if (!obj.is_object()) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("element {} is not an object", r));
    }
    auto require = [&](const char* key) -> const Json& {
      if (!obj.contains(key)) {
        throw Error(ErrorCode::kMissingColumn,
                    fmt::format("element {} is missing '{}'", r, key));
      }
      return obj.at(key);
    };
    TestCase tc;
    const auto& id = require("id");
    if (!id.is_string()) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("element {}: 'id' must be a string", r));
    }
    tc.id = id.get<std::string>();
    const auto& outcome = require("outcome");
    if (!outcome.is_string()) {
      throw Error(ErrorCode::kUnknownOutcomeToken,
                  fmt::format("element {}: 'outcome' must be a string", r));
    }
    tc.outcome = parse_outcome(outcome.get<std::string>());
    if (obj.contains("text")) tc.raw_text = obj.at("text").get<std::string>();
    if (obj.contains("category")) {
      tc.category = obj.at("category").get<std::string>();
    }
    if (obj.contains("features")) {
      const auto& feats = obj.at("features");
      if (!feats.is_object()) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("element {}: 'features' must be an object", r));
      }
      if (!names_known) {
        for (const auto& [name, _] : feats.items()) {
          suite.feature_names.push_back(name);
        }
        names_known = true;
      }
      if (feats.size() != suite.feature_names.size()) {
        throw Error(ErrorCode::kMissingColumn,
                    fmt::format("element {} ('{}') has {} features, expected {}",
                                r, tc.id, feats.size(),
                                suite.feature_names.size()));
      }
      for (const auto& name : suite.feature_names) {
        if (!feats.contains(name)) {
          throw Error(ErrorCode::kMissingColumn,
                      fmt::format("element {} ('{}') is missing feature '{}'",
                                  r, tc.id, name));
        }
        const auto& v = feats.at(name);
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
          throw Error(ErrorCode::kNonNumericFeature,
                      fmt::format("element {} ('{}'), feature '{}': not a "
                                  "finite number",
                                  r, tc.id, name));
        }
        tc.features.push_back(v.get<double>());
      }
    } else if (!tc.raw_text) {
      throw Error(ErrorCode::kMissingColumn,
                  fmt::format("element {} has neither 'features' nor 'text'",
                              r));
    } else if (names_known) {
      throw Error(ErrorCode::kMissingColumn,
                  fmt::format("element {} ('{}') is missing 'features'", r,
                              tc.id));
    }
    suite.cases.push_back(std::move(tc));
  }
  validate(suite);
  return suite;
}

std::string serialize_suite_csv(const TestSuite& suite) {
  const bool text = suite.has_text();
  const bool category = suite.has_categories();
  std::string out = "id,outcome";
  if (category) out += ",category";
  if (text) out += ",text";
  for (const auto& name : suite.feature_names) {
    out += ",";
    out += detail::csv_escape(std::string(kFeaturePrefix) + name);
  }
  out += "\n";
  for (const auto& c : suite.cases) {
    out += detail::csv_escape(c.id);
    out += ",";
    out += outcome_token(c.outcome);
    if (category) out += "," + detail::csv_escape(*c.category);
    if (text) out += "," + detail::csv_escape(*c.raw_text);
    for (double v : c.features) out += fmt::format(",{}", v);
    out += "\n";
  }
  return out;
}

std::string serialize_suite_json(const TestSuite& suite) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& c : suite.cases) {
    nlohmann::ordered_json obj;
    obj["id"] = c.id;
    obj["outcome"] = outcome_token(c.outcome);
    if (c.category) obj["category"] = *c.category;
    if (c.raw_text) obj["text"] = *c.raw_text;
    if (!suite.feature_names.empty()) {
      nlohmann::ordered_json feats = nlohmann::ordered_json::object();
      for (std::size_t k = 0; k < suite.feature_names.size(); ++k) {
        feats[suite.feature_names[k]] = c.features[k];
      }
      obj["features"] = std::move(feats);
    }
    doc.push_back(std::move(obj));
  }
  return doc.dump(2) + "\n";
}

std::optional<std::size_t> FeatureMatrix::index_of(std::string_view name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

FeatureMatrix feature_matrix(const TestSuite& suite) {
  if (suite.feature_names.empty()) {
    if (!suite.has_text()) {
      throw Error(ErrorCode::kMissingColumn,
                  "suite has neither numeric features nor text");
    }
    std::vector<std::string> texts;
    texts.reserve(suite.size());
    for (const auto& c : suite.cases) texts.push_back(*c.raw_text);
    return featurize_text(texts);
  }
  FeatureMatrix m;
  m.names = suite.feature_names;
  m.values.resize(static_cast<Eigen::Index>(suite.size()),
                  static_cast<Eigen::Index>(suite.feature_names.size()));
  for (std::size_t i = 0; i < suite.size(); ++i) {
    for (std::size_t j = 0; j < suite.feature_names.size(); ++j) {
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          suite.cases[i].features[j];
    }
  }
  return m;
}

FeatureMatrix featurize_text(std::span<const std::string> texts,
                             const TextFeatureConfig& config) {
  if (texts.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no texts to featurize");
  }
  FeatureMatrix m;
  m.names = {"char_length",         "token_count",        "type_token_ratio",
             "mean_token_length",   "punctuation_density", "digit_density"};
  m.values.resize(static_cast<Eigen::Index>(texts.size()), 6);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const std::string_view text = texts[i];
    const auto chars = static_cast<double>(code_points(text));
    const auto tokens = whitespace_tokens(text);

    std::unordered_set<std::string> types;
    double token_chars = 0.0;
    for (auto t : tokens) {
      std::string type(t);
      if (config.case_fold_types) {
        std::transform(type.begin(), type.end(), type.begin(),
                       [](unsigned char c) { return std::tolower(c); });
      }
      types.insert(std::move(type));
      token_chars += static_cast<double>(code_points(t));
    }
    double punct = 0.0, digits = 0.0;
    for (unsigned char c : text) {
      if (c < 0x80 && std::ispunct(c)) punct += 1.0;
      if (c < 0x80 && std::isdigit(c)) digits += 1.0;
    }
    const auto n_tokens = static_cast<double>(tokens.size());
    const auto row = static_cast<Eigen::Index>(i);
    m.values(row, 0) = chars;
    m.values(row, 1) = n_tokens;
    m.values(row, 2) = tokens.empty() ? 0.0 : types.size() / n_tokens;
    m.values(row, 3) = tokens.empty() ? 0.0 : token_chars / n_tokens;
    m.values(row, 4) = chars > 0 ? punct / chars : 0.0;
    m.values(row, 5) = chars > 0 ? digits / chars : 0.0;
  }
  return m;
}

PrincipalComponents principal_components(const Eigen::MatrixXd& data, int k) {
  const Eigen::Index n = data.rows();
  const Eigen::Index m = data.cols();
  if (k < 1 || n < 2 || k > std::min<Eigen::Index>(n - 1, m)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("component count k={} outside [1, min(n-1, m)] "
                            "for a {}x{} matrix",
                            k, n, m));
  }
  if (!data.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "matrix has non-finite entries");
  }

  PrincipalComponents pc;
  pc.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - pc.mean.transpose();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "eigendecomposition failed");
  }
  // Ascending order from Eigen; walk it backwards.
  const Eigen::VectorXd& evals = solver.eigenvalues();
  const double largest = std::max(evals(m - 1), 0.0);
  const double tol = 1e-10 * largest;
  int available = 0;
  for (int j = 0; j < k; ++j) {
    if (largest > 0.0 && evals(m - 1 - j) > tol) ++available;
  }
  pc.rank_deficient = available < k;

  pc.loadings.resize(m, available);
  pc.explained_variance.resize(available);
  for (int j = 0; j < available; ++j) {
    Eigen::VectorXd v = solver.eigenvectors().col(m - 1 - j);
    Eigen::Index arg = 0;
    for (Eigen::Index r = 1; r < m; ++r) {
      if (std::abs(v(r)) > std::abs(v(arg))) arg = r;
    }
    if (v(arg) < 0.0) v = -v;
    pc.loadings.col(j) = v;
    pc.explained_variance(j) = evals(m - 1 - j);
  }
  pc.scores = centered * pc.loadings;
  return pc;
}

ReducedEmbeddings reduce_embeddings(const Eigen::MatrixXd& embeddings, int k) {
  auto pc = principal_components(embeddings, k);
  ReducedEmbeddings out;
  out.rank_deficient = pc.rank_deficient;
  out.explained_variance = pc.explained_variance;
  for (Eigen::Index j = 0; j < pc.scores.cols(); ++j) {
    out.features.names.push_back(fmt::format("pc_{}", j + 1));
  }
  out.features.values = std::move(pc.scores);
  return out;
}

Eigen::MatrixXd load_embeddings_jsonl(const std::filesystem::path& path,
                                      const TestSuite& suite) {
  const std::string text = detail::read_file(path);
  std::unordered_map<std::string, std::vector<double>> by_id;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("line {}: {}", line_no, e.what()));
    }
    if (!obj.contains("id") || !obj.contains("vector")) {
      throw Error(ErrorCode::kMissingColumn,
                  fmt::format("line {}: need 'id' and 'vector'", line_no));
    }
    auto vec = obj.at("vector").get<std::vector<double>>();
    if (dim == 0) dim = vec.size();
    if (vec.size() != dim || dim == 0) {
      throw Error(ErrorCode::kDimensionMismatch,
                  fmt::format("line {}: vector length {} (expected {})",
                              line_no, vec.size(), dim));
    }
    auto id = obj.at("id").get<std::string>();
    if (!by_id.emplace(id, std::move(vec)).second) {
      throw Error(ErrorCode::kDuplicateId,
                  fmt::format("line {}: duplicate id '{}'", line_no, id));
    }
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(suite.size()),
                      static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto it = by_id.find(suite.cases[i].id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kMissingColumn,
                  fmt::format("no embedding for test case '{}'",
                              suite.cases[i].id));
    }
    for (std::size_t j = 0; j < dim; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          it->second[j];
    }
  }
  return out;
}

FeatureMatrix standardize(const FeatureMatrix& matrix) {
  const Eigen::Index n = matrix.rows();
  if (n < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("standardization needs at least 2 rows, got {}", n));
  }
  if (!matrix.values.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "matrix has non-finite entries");
  }
  FeatureMatrix out;
  out.dropped_constant_columns = matrix.dropped_constant_columns;
  std::vector<Eigen::Index> kept;
  std::vector<double> means, stds;
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
    const auto col = matrix.values.col(j);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / static_cast<double>(n);
    const double sd = std::sqrt(var);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      out.dropped_constant_columns.push_back(matrix.names[static_cast<std::size_t>(j)]);
      continue;
    }
    kept.push_back(j);
    means.push_back(mean);
    stds.push_back(sd);
  }
  if (kept.empty()) {
    throw Error(ErrorCode::kAllColumnsConstant,
                "every feature column has zero variance");
  }
  const auto d = static_cast<Eigen::Index>(kept.size());
  out.values.resize(n, d);
  out.column_means.resize(d);
  out.column_stds.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const auto src = kept[static_cast<std::size_t>(k)];
    out.names.push_back(matrix.names[static_cast<std::size_t>(src)]);
    out.column_means(k) = means[static_cast<std::size_t>(k)];
    out.column_stds(k) = stds[static_cast<std::size_t>(k)];
    out.values.col(k) =
        (matrix.values.col(src).array() - out.column_means(k)) / out.column_stds(k);
  }
  return out;
}

}  // namespace instascope
