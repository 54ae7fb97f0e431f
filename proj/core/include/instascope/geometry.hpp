#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "instascope/corpus.hpp"

namespace instascope {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Counter-clockwise convex polygon without repeated vertices. Fewer than
// three vertices denote a degenerate polygon (area 0).
struct Polygon {
  std::vector<Point> vertices;

  bool degenerate() const { return vertices.size() < 3; }
};

// z-component of (b - a) x (c - a).
double cross(const Point& a, const Point& b, const Point& c);

// Andrew's monotone chain. Collinear boundary points are excluded.
// Throws Error{kEmptyInput} for no points.
Polygon convex_hull(std::span<const Point> points);

// Absolute shoelace area.
double polygon_area(const Polygon& polygon);

// Boundary-inclusive containment with an absolute distance tolerance.
bool contains(const Polygon& polygon, const Point& p, double tolerance = 1e-9);

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
};

// Column-wise [min, max] of a matrix.
std::vector<FeatureRange> feature_ranges(const Eigen::MatrixXd& features);

// Convex hull of the feature bounding box corners mapped through the 2 x d
// matrix. All 2^d corners for d <= 16, otherwise 65,536 corners drawn from
// a mt19937_64 stream seeded with `seed`.
Polygon estimate_boundary(const Eigen::MatrixXd& a_matrix,
                          std::span<const FeatureRange> ranges,
                          std::uint64_t seed = 0);

struct InstanceSpace {
  std::vector<std::string> ids;
  std::vector<Point> points;
  std::vector<Outcome> outcomes;
  Polygon boundary;

  std::size_t size() const { return points.size(); }
};

std::vector<Point> to_points(const Eigen::MatrixXd& coordinates);

// Hull of the Effective points. With `prune`, points whose distance to their
// k-th nearest Effective neighbour exceeds mean + 2 std of that statistic
// are removed first. No Effective points give an empty polygon.
Polygon buggy_region(const InstanceSpace& space, bool prune = false, int k = 5);

enum class CellState : std::uint8_t { kOutside, kEmpty, kOccupied };

struct CoverageGrid {
  int cells_per_axis = 0;
  Point origin;       // lower-left corner of the boundary's bounding box
  double cell_width = 0.0;
  double cell_height = 0.0;
  std::vector<CellState> cells;  // row-major, index = iy * G + ix
  std::size_t total = 0;
  std::size_t occupied = 0;
  double coverage = 0.0;
};

// Uniform G x G grid over the boundary's bounding box. A cell counts when
// its center lies in the boundary and is occupied when an instance falls in
// it (half-open cells, the last row/column closed).
// Throws Error{kDegenerateBoundary} for a boundary without area.
CoverageGrid coverage_grid(std::span<const Point> points, const Polygon& boundary,
                           int cells_per_axis = 20);

}  // namespace instascope
