#include "relaxosc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relaxosc::geometry {

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  double vx = b.x - a.x, vy = b.y - a.y;
  double wx = p.x - a.x, wy = p.y - a.y;
  double vv = vx * vx + vy * vy;
  double t = vv > 0.0 ? std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0) : 0.0;
  double dx = wx - t * vx, dy = wy - t * vy;
  return std::hypot(dx, dy);
}

std::vector<Point> resample_polyline(const std::vector<Point>& poly,
                                     std::size_t n) {
  if (n < 2) throw std::invalid_argument("resample_polyline: n must be >= 2");
  if (poly.size() < 2) return poly;

  std::vector<double> cum(poly.size(), 0.0);
  for (std::size_t i = 1; i < poly.size(); ++i)
    cum[i] = cum[i - 1] + std::hypot(poly[i].x - poly[i - 1].x,
                                     poly[i].y - poly[i - 1].y);
  double total = cum.back();
  if (total <= 0.0) return {poly.front()};

  std::vector<Point> out;
  out.reserve(n);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = total * static_cast<double>(i) / static_cast<double>(n - 1);
    while (seg + 1 < cum.size() - 1 && cum[seg + 1] < s) ++seg;
    double len = cum[seg + 1] - cum[seg];
    double t = len > 0.0 ? (s - cum[seg]) / len : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    out.push_back({poly[seg].x + t * (poly[seg + 1].x - poly[seg].x),
                   poly[seg].y + t * (poly[seg + 1].y - poly[seg].y)});
  }
  return out;
}

namespace {

// sup over vertices of a of the distance to the polyline b.
double directed(const std::vector<Point>& a, const std::vector<Point>& b) {
  double worst = 0.0;
  for (const auto& p : a) {
    double best = std::numeric_limits<double>::infinity();
    if (b.size() == 1) {
      best = std::hypot(p.x - b[0].x, p.y - b[0].y);
    } else {
      for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        best = std::min(best, point_segment_distance(p, b[i], b[i + 1]));
        if (best == 0.0) break;
      }
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double hausdorff_distance(const std::vector<Point>& a,
                          const std::vector<Point>& b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("hausdorff_distance: empty polyline");
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace relaxosc::geometry
