#include "instascope/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "instascope/error.hpp"

namespace instascope {

namespace {

constexpr int kMaxExhaustiveDims = 16;
constexpr std::size_t kSampledCorners = 65536;

double segment_distance(const Point& a, const Point& b, const Point& p) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

}  // namespace

double cross(const Point& a, const Point& b, const Point& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

Polygon convex_hull(std::span<const Point> points) {
  if (points.empty()) throw Error(ErrorCode::kEmptyInput, "convex_hull: no points");
  std::vector<Point> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return Polygon{pts};

  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return Polygon{std::move(hull)};
}

double polygon_area(const Polygon& polygon) {
  const auto& v = polygon.vertices;
  if (v.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) * 0.5;
}

bool contains(const Polygon& polygon, const Point& p, double tolerance) {
  const auto& v = polygon.vertices;
  switch (v.size()) {
    case 0:
      return false;
    case 1:
      return std::hypot(p.x - v[0].x, p.y - v[0].y) <= tolerance;
    case 2:
      return segment_distance(v[0], v[1], p) <= tolerance;
    default:
      break;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    // Signed distance to the left of edge a->b.
    if (cross(a, b, p) < -tolerance * len) return false;
  }
  return true;
}

std::vector<FeatureRange> feature_ranges(const Eigen::MatrixXd& features) {
  std::vector<FeatureRange> ranges;
  ranges.reserve(static_cast<std::size_t>(features.cols()));
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    if (features.rows() == 0) {
      ranges.push_back({0.0, 0.0});
    } else {
      ranges.push_back({features.col(j).minCoeff(), features.col(j).maxCoeff()});
    }
  }
  return ranges;
}

Polygon estimate_boundary(const Eigen::MatrixXd& a_matrix,
                          std::span<const FeatureRange> ranges,
                          std::uint64_t seed) {
  const auto d = static_cast<std::size_t>(a_matrix.cols());
  if (a_matrix.rows() != 2 || ranges.size() != d) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("boundary: {}x{} map with {} ranges", a_matrix.rows(),
                            a_matrix.cols(), ranges.size()));
  }
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "boundary: no features");

  auto project_corner = [&](auto&& bit) {
    Point p;
    for (std::size_t j = 0; j < d; ++j) {
      const double v = bit(j) ? ranges[j].max : ranges[j].min;
      p.x += a_matrix(0, static_cast<Eigen::Index>(j)) * v;
      p.y += a_matrix(1, static_cast<Eigen::Index>(j)) * v;
    }
    return p;
  };

  std::vector<Point> corners;
  if (d <= kMaxExhaustiveDims) {
    const std::uint64_t count = std::uint64_t{1} << d;
    corners.reserve(count);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      corners.push_back(project_corner([mask](std::size_t j) { return (mask >> j) & 1U; }));
    }
  } else {
    std::mt19937_64 rng(seed);
    corners.reserve(kSampledCorners);
    std::vector<bool> bits(d);
    for (std::size_t s = 0; s < kSampledCorners; ++s) {
      std::uint64_t word = 0;
      for (std::size_t j = 0; j < d; ++j) {
        if (j % 64 == 0) word = rng();
        bits[j] = (word >> (j % 64)) & 1U;
      }
      corners.push_back(project_corner([&bits](std::size_t j) { return bits[j]; }));
    }
  }
  return convex_hull(corners);
}

std::vector<Point> to_points(const Eigen::MatrixXd& coordinates) {
  if (coordinates.cols() != 2) {
    throw Error(ErrorCode::kDimensionMismatch, "coordinates must have 2 columns");
  }
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(coordinates.rows()));
  for (Eigen::Index i = 0; i < coordinates.rows(); ++i) {
    pts.push_back({coordinates(i, 0), coordinates(i, 1)});
  }
  return pts;
}

Polygon buggy_region(const InstanceSpace& space, bool prune, int k) {
  std::vector<Point> failing;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (space.outcomes[i] == Outcome::kEffective) failing.push_back(space.points[i]);
  }
  if (failing.empty()) return Polygon{};

  if (prune && k >= 1) {
    const std::size_t m = failing.size();
    const std::size_t kth = std::min<std::size_t>(static_cast<std::size_t>(k), m - 1);
    if (kth >= 1) {
      std::vector<double> stat(m);
      std::vector<double> dists;
      for (std::size_t i = 0; i < m; ++i) {
        dists.clear();
        for (std::size_t j = 0; j < m; ++j) {
          if (j != i) {
            dists.push_back(std::hypot(failing[i].x - failing[j].x,
                                       failing[i].y - failing[j].y));
          }
        }
        std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(kth - 1),
                         dists.end());
        stat[i] = dists[kth - 1];
      }
      double mean = 0.0;
      for (double s : stat) mean += s;
      mean /= static_cast<double>(m);
      double var = 0.0;
      for (double s : stat) var += (s - mean) * (s - mean);
      const double cutoff = mean + 2.0 * std::sqrt(var / static_cast<double>(m));
      std::vector<Point> kept;
      for (std::size_t i = 0; i < m; ++i) {
        if (!(stat[i] > cutoff)) kept.push_back(failing[i]);
      }
      failing = std::move(kept);
    }
  }
  return convex_hull(failing);
}

CoverageGrid coverage_grid(std::span<const Point> points, const Polygon& boundary,
                           int cells_per_axis) {
  if (cells_per_axis < 1) {
    throw Error(ErrorCode::kInvalidArgument, "grid needs at least one cell per axis");
  }
  if (boundary.degenerate() || !(polygon_area(boundary) > 0.0)) {
    throw Error(ErrorCode::kDegenerateBoundary, "boundary polygon has no area");
  }
  double xmin = boundary.vertices[0].x, xmax = xmin;
  double ymin = boundary.vertices[0].y, ymax = ymin;
  for (const auto& v : boundary.vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }

  CoverageGrid grid;
  const int g = cells_per_axis;
  grid.cells_per_axis = g;
  grid.origin = {xmin, ymin};
  grid.cell_width = (xmax - xmin) / g;
  grid.cell_height = (ymax - ymin) / g;
  grid.cells.assign(static_cast<std::size_t>(g) * static_cast<std::size_t>(g),
                    CellState::kOutside);

  const double tol = 1e-12 * std::max({1.0, xmax - xmin, ymax - ymin});
  for (int iy = 0; iy < g; ++iy) {
    for (int ix = 0; ix < g; ++ix) {
      const Point center{xmin + (ix + 0.5) * grid.cell_width,
                         ymin + (iy + 0.5) * grid.cell_height};
      if (contains(boundary, center, tol)) {
        grid.cells[static_cast<std::size_t>(iy * g + ix)] = CellState::kEmpty;
        ++grid.total;
      }
    }
  }

  auto cell_of = [g](double v, double lo, double hi, double width) {
    if (v >= hi) return g - 1;
    return std::min(g - 1, static_cast<int>(std::floor((v - lo) / width)));
  };
  for (const auto& p : points) {
    if (p.x < xmin || p.x > xmax || p.y < ymin || p.y > ymax) continue;
    const int ix = cell_of(p.x, xmin, xmax, grid.cell_width);
    const int iy = cell_of(p.y, ymin, ymax, grid.cell_height);
    auto& cell = grid.cells[static_cast<std::size_t>(iy * g + ix)];
    if (cell == CellState::kEmpty) {
      cell = CellState::kOccupied;
      ++grid.occupied;
    }
  }
  grid.coverage = grid.total > 0
                      ? static_cast<double>(grid.occupied) / static_cast<double>(grid.total)
                      : 0.0;
  return grid;
}

}  // namespace instascope
