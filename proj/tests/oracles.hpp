#pragma once
// Independent brute-force reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "deskorg/geometry.hpp"
#include "deskorg/rng.hpp"

namespace oracle {

using deskorg::Point2;

// O(n^3): (i -> j) is a CCW hull edge iff every other point is strictly left of
// it. Returns the hull starting at the lexicographically smallest vertex.
inline std::vector<Point2> hull_all_pairs(const std::vector<Point2>& pts) {
  const std::size_t n = pts.size();
  std::vector<int> next(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      bool ok = true;
      for (std::size_t k = 0; k < n && ok; ++k) {
        if (k == i || k == j) continue;
        const double c = (pts[j].x - pts[i].x) * (pts[k].y - pts[i].y) -
                         (pts[j].y - pts[i].y) * (pts[k].x - pts[i].x);
        if (c <= 0.0) ok = false;
      }
      if (ok) next[i] = static_cast<int>(j);
    }
  }
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (next[i] < 0) continue;
    if (start == n || pts[i].x < pts[start].x ||
        (pts[i].x == pts[start].x && pts[i].y < pts[start].y))
      start = i;
  }
  std::vector<Point2> out;
  if (start == n) return out;
  std::size_t cur = start;
  do {
    out.push_back(pts[cur]);
    cur = static_cast<std::size_t>(next[cur]);
  } while (cur != start && out.size() <= n);
  return out;
}

// Axis-aligned bounding-box area after rotating by -phi, minimized over a
// uniform angle sweep.
inline double min_rect_area_sweep(const std::vector<Point2>& pts, double step_deg) {
  double best = std::numeric_limits<double>::infinity();
  const int steps = static_cast<int>(std::lround(90.0 / step_deg));
  for (int s = 0; s < steps; ++s) {
    const double phi = deskorg::deg2rad(step_deg * s);
    const double c = std::cos(phi), sn = std::sin(phi);
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& p : pts) {
      const double x = c * p.x + sn * p.y, y = -sn * p.x + c * p.y;
      x0 = std::min(x0, x); x1 = std::max(x1, x);
      y0 = std::min(y0, y); y1 = std::max(y1, y);
    }
    best = std::min(best, (x1 - x0) * (y1 - y0));
  }
  return best;
}

// Exact minimum over the finite candidate set of hull-edge orientations.
inline double min_rect_area_edges(const std::vector<Point2>& hull) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = hull.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = std::atan2(hull[(i + 1) % n].y - hull[i].y,
                                  hull[(i + 1) % n].x - hull[i].x);
    const double c = std::cos(phi), sn = std::sin(phi);
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& p : hull) {
      const double x = c * p.x + sn * p.y, y = -sn * p.x + c * p.y;
      x0 = std::min(x0, x); x1 = std::max(x1, x);
      y0 = std::min(y0, y); y1 = std::max(y1, y);
    }
    best = std::min(best, (x1 - x0) * (y1 - y0));
  }
  return best;
}

inline std::vector<Point2> random_points(deskorg::Rng& rng, std::size_t n,
                                         double scale = 1.0) {
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back({rng.uniform(-scale, scale), rng.uniform(-scale, scale)});
  return pts;
}

// Random convex polygon: hull of points on a jittered ellipse.
inline deskorg::Polygon random_convex_polygon(deskorg::Rng& rng) {
  const std::size_t n = 3 + rng.index(12);
  const double ax = rng.uniform(0.02, 0.5), ay = rng.uniform(0.02, 0.5);
  const double rot = rng.uniform(-deskorg::kPi, deskorg::kPi);
  const Point2 c{rng.uniform(-1, 1), rng.uniform(-1, 1)};
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < n + 3; ++i) {
    const double t = rng.uniform(0, 2 * deskorg::kPi);
    pts.push_back(c + deskorg::rotate({ax * std::cos(t), ay * std::sin(t)}, rot));
  }
  return deskorg::convex_hull(pts);
}

inline bool rect_contains(const deskorg::OrientedRect& r, Point2 p, double tol) {
  const auto d = p - r.center;
  return std::abs(deskorg::dot(d, r.major_axis())) <= r.half_a + tol &&
         std::abs(deskorg::dot(d, r.minor_axis())) <= r.half_b + tol;
}

}  // namespace oracle
