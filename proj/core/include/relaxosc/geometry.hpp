#pragma once

// Planar polyline utilities used to compare computed cycles with predicted
// singular configurations.

#include <cstddef>
#include <vector>

namespace relaxosc::geometry {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Euclidean distance from p to the closed segment [a, b].
double point_segment_distance(const Point& p, const Point& a, const Point& b);

// Redistribute a polyline's vertices uniformly by arclength. Degenerate
// inputs (fewer than two distinct points) are returned unchanged. n >= 2.
std::vector<Point> resample_polyline(const std::vector<Point>& poly,
                                     std::size_t n);

// Symmetric Hausdorff distance between two polylines: vertices of each are
// measured against the segments of the other, so the result reflects the
// curves rather than the sampling.
double hausdorff_distance(const std::vector<Point>& a,
                          const std::vector<Point>& b);

}  // namespace relaxosc::geometry
