#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "adiabat/geometry.hpp"

namespace adiabat {

/// Scalar field sampled on a regular grid of nx x ny vertices over a domain
/// rectangle. NaN entries mark cells where evaluation failed (masked).
struct GridField {
  DomainRect domain;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;  // row-major, index j*nx + i

  double x_at(int i) const {
    return domain.x_min + domain.width() * i / (nx - 1);
  }
  double y_at(int j) const {
    return domain.y_min + domain.height() * j / (ny - 1);
  }
  double at(int i, int j) const { return values[static_cast<size_t>(j) * nx + i]; }
};

/// Evaluates `fn` on the grid; rows are processed in parallel with no shared
/// mutable state, so the result is identical to a sequential evaluation.
/// std::nullopt marks a masked vertex.
GridField evaluate_grid(
    const DomainRect& domain, int nx, int ny,
    const std::function<std::optional<double>(double, double)>& fn);

/// Marching squares with linear edge interpolation. Cells with a masked
/// corner are skipped; saddle cells are disambiguated by the cell average.
/// Returned polylines are ordered deterministically; closed loops repeat
/// their first vertex.
std::vector<Polyline> extract_level(const GridField& grid, double level);

double point_segment_distance(Point p, Point a, Point b);
double distance_to_polylines(Point p, const std::vector<Polyline>& lines);

/// Symmetric Hausdorff distance between two polyline sets, measured from the
/// vertices of each to the segments of the other.
double hausdorff_distance(const std::vector<Polyline>& a,
                          const std::vector<Polyline>& b);

}  // namespace adiabat
