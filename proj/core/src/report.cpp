#include "instascope/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"

namespace instascope {

namespace {

using Json = nlohmann::ordered_json;

Json number(double v) { return round_significant(v); }

Json number_or_null(const std::optional<double>& v) {
  return v ? number(*v) : Json(nullptr);
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json projection_object(const Projection& p) {
  Json obj;
  obj["A"] = matrix_json(p.a_matrix);
  obj["B"] = matrix_json(p.b_matrix);
  obj["c"] = Json::array({number(p.c_vector(0)), number(p.c_vector(1))});
  obj["objective"] = number(p.objective());
  obj["trend_r2_outcome"] = number(p.trend_r2_outcome);
  obj["topo_spearman"] = number(p.topo_spearman);
  Json r2 = Json::array();
  for (Eigen::Index j = 0; j < p.trend_r2_features.size(); ++j) {
    r2.push_back(number(p.trend_r2_features(j)));
  }
  obj["trend_r2_features"] = std::move(r2);
  obj["iterations"] = p.iterations;
  return obj;
}

Json diversity_object(const DiversityScore& d) {
  Json obj;
  obj["shannon_h"] = number(d.shannon_h);
  obj["richness"] = d.richness;
  obj["evenness"] = number(d.evenness);
  obj["geometric_logdet"] = number_or_null(d.geometric_logdet);
  return obj;
}

std::string fixed6(double v) {
  auto s = fmt::format("{:.6f}", v);
  return s == "-0.000000" ? "0.000000" : s;
}

std::string fixed2(double v) {
  auto s = fmt::format("{:.2f}", v);
  return s == "-0.00" ? "0.00" : s;
}

}  // namespace

double round_significant(double value, int digits) {
  if (!std::isfinite(value)) return value;
  const auto text = fmt::format("{:.{}g}", value, digits);
  return std::strtod(text.c_str(), nullptr);
}

std::string report_json(const InstanceSpaceModel& model, const TisaReport& report) {
  Json doc;
  doc["instance_space_area"] = number(report.instance_space_area);
  doc["buggy_region_area"] = number(report.buggy_region_area);
  doc["boundary_area"] = number(report.boundary_area);
  doc["coverage"] = number(report.coverage);
  doc["grid"] = {{"G", report.grid_cells_per_axis},
                 {"total", report.grid_cells_total},
                 {"occupied", report.grid_cells_occupied}};
  doc["diversity"] = diversity_object(report.diversity);
  doc["selected_features"] = model.selected_names;
  doc["projection"] = projection_object(model.projection);
  doc["warnings"] = report.warnings;
  return doc.dump(2) + "\n";
}

std::string projection_json(const InstanceSpaceModel& model) {
  Json doc;
  doc["selected_features"] = model.selected_names;
  Json trace = Json::array();
  for (const auto& step : model.selection.selection_trace) {
    trace.push_back({{"feature", model.standardized_names[step.feature]},
                     {"balanced_accuracy", number(step.balanced_accuracy)}});
  }
  doc["selection_trace"] = std::move(trace);
  Json significance = Json::array();
  for (const auto& e : model.significance.entries) {
    significance.push_back(
        {{"feature", e.name}, {"r", number(e.point_biserial_r)}, {"rank", e.abs_rank}});
  }
  doc["significance"] = std::move(significance);
  doc["dropped_constant_columns"] = model.dropped_constant_columns;
  doc["projection"] = projection_object(model.projection);
  Json boundary = Json::array();
  for (const auto& v : model.boundary.vertices) {
    boundary.push_back(Json::array({number(v.x), number(v.y)}));
  }
  doc["boundary"] = std::move(boundary);
  doc["warnings"] = model.warnings;
  return doc.dump(2) + "\n";
}

std::string diversity_json(const DiversityScore& score, const AnalysisConfig& config) {
  Json doc = diversity_object(score);
  doc["kernel"] = kernel_name(config.kernel.kind);
  if (config.kernel.kind == KernelKind::kRbf) doc["gamma"] = number(config.kernel.gamma);
  doc["epsilon"] = number(config.kernel.epsilon);
  doc["degenerate"] = !score.geometric_logdet.has_value();
  return doc.dump(2) + "\n";
}

std::string instance_space_csv(const InstanceSpace& space) {
  std::string out = "id,x,y,outcome\n";
  for (std::size_t i = 0; i < space.size(); ++i) {
    out += fmt::format("{},{},{},{}\n", detail::csv_escape(space.ids[i]),
                       fixed6(space.points[i].x), fixed6(space.points[i].y),
                       outcome_token(space.outcomes[i]));
  }
  return out;
}

std::string histograms_csv(const std::vector<FeatureHistogram>& histograms) {
  std::string out = "feature,bin,lower,upper,effective,ineffective\n";
  for (const auto& h : histograms) {
    const auto bins = h.effective.size();
    const double width = bins > 0 ? (h.max - h.min) / static_cast<double>(bins) : 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      const double lower = h.min + width * static_cast<double>(b);
      const double upper = b + 1 == bins ? h.max : h.min + width * static_cast<double>(b + 1);
      out += fmt::format("{},{},{},{},{},{}\n", detail::csv_escape(h.feature), b,
                         fixed6(lower), fixed6(upper), h.effective[b], h.ineffective[b]);
    }
  }
  return out;
}

std::string learning_curve_csv(const OracleSession& session) {
  std::string out = "queries,accuracy\n";
  for (const auto& p : session.curve) {
    out += fmt::format("{},{}\n", p.queries_used, fixed6(p.heldout_accuracy));
  }
  return out;
}

std::string disagreement_csv(const std::vector<DisagreementEntry>& entries) {
  std::string out = "id,disagreement,biased,total\n";
  for (const auto& e : entries) {
    out += fmt::format("{},{},{},{}\n", detail::csv_escape(e.id), fixed6(e.disagreement),
                       e.biased, e.total);
  }
  return out;
}

std::string render_svg(const InstanceSpace& space, const Polygon& boundary,
                       const Polygon& buggy) {
  constexpr int kWidth = 800;
  constexpr int kHeight = 600;
  constexpr double kLeft = 70.0, kRight = 780.0, kTop = 20.0, kBottom = 540.0;
  constexpr int kTicks = 5;

  bool any = false;
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  auto include = [&](const Point& p) {
    if (!any) {
      x0 = x1 = p.x;
      y0 = y1 = p.y;
      any = true;
    }
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  };
  for (const auto& p : space.points) include(p);
  for (const auto& p : boundary.vertices) include(p);
  for (const auto& p : buggy.vertices) include(p);
  auto pad = [](double& lo, double& hi) {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double margin = 0.05 * (hi - lo);
    lo -= margin;
    hi += margin;
  };
  pad(x0, x1);
  pad(y0, y1);

  auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * (kRight - kLeft); };
  auto sy = [&](double y) { return kBottom - (y - y0) / (y1 - y0) * (kBottom - kTop); };
  auto path = [&](const Polygon& poly) {
    std::string d;
    for (std::size_t i = 0; i < poly.vertices.size(); ++i) {
      d += fmt::format("{}{},{} ", i == 0 ? 'M' : 'L', fixed2(sx(poly.vertices[i].x)),
                       fixed2(sy(poly.vertices[i].y)));
    }
    return d + "Z";
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      kWidth, kHeight);
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
                     kWidth, kHeight);

  svg += "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\" font-family=\"sans-serif\" "
         "font-size=\"11\">\n";
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>\n", fixed2(kLeft),
                     fixed2(kBottom), fixed2(kRight));
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\"/>\n", fixed2(kLeft),
                     fixed2(kBottom), fixed2(kTop));
  for (int i = 0; i <= kTicks; ++i) {
    const double xv = x0 + (x1 - x0) * i / kTicks;
    const double yv = y0 + (y1 - y0) * i / kTicks;
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\"/>\n", fixed2(sx(xv)),
                       fixed2(kBottom), fixed2(kBottom + 5));
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" stroke=\"none\">{}</text>\n",
        fixed2(sx(xv)), fixed2(kBottom + 18), fixed2(xv));
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>\n", fixed2(kLeft - 5),
                       fixed2(sy(yv)), fixed2(kLeft));
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" stroke=\"none\">{}</text>\n",
        fixed2(kLeft - 8), fixed2(sy(yv) + 4), fixed2(yv));
  }
  svg += fmt::format(
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" stroke=\"none\">Z1</text>\n",
      fixed2((kLeft + kRight) / 2), fixed2(kBottom + 40));
  svg += fmt::format(
      "<text x=\"{0}\" y=\"{1}\" text-anchor=\"middle\" stroke=\"none\" "
      "transform=\"rotate(-90 {0} {1})\">Z2</text>\n",
      fixed2(20.0), fixed2((kTop + kBottom) / 2));
  svg += "</g>\n";

  svg += "<g id=\"instances\" stroke=\"none\">\n";
  for (std::size_t i = 0; i < space.size(); ++i) {
    const char* fill = "#7f7f7f";
    if (space.outcomes[i] == Outcome::kEffective) fill = "#d62728";
    if (space.outcomes[i] == Outcome::kIneffective) fill = "#1f77b4";
    svg += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\" fill-opacity=\"0.8\"/>\n",
                       fixed2(sx(space.points[i].x)), fixed2(sy(space.points[i].y)), fill);
  }
  svg += "</g>\n";

  if (!boundary.vertices.empty()) {
    svg += fmt::format(
        "<path id=\"boundary\" d=\"{}\" fill=\"none\" stroke=\"black\" "
        "stroke-dasharray=\"6 4\" stroke-width=\"1.5\"/>\n",
        path(boundary));
  }
  if (buggy.vertices.size() >= 2) {
    svg += fmt::format(
        "<path id=\"buggy-region\" d=\"{}\" fill=\"#d62728\" fill-opacity=\"0.15\" "
        "stroke=\"#d62728\" stroke-width=\"1.5\"/>\n",
        path(buggy));
  }
  svg += "</svg>\n";
  return svg;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  detail::write_file(path, content);
}

}  // namespace instascope
