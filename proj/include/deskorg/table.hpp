#pragma once

#include <cmath>
#include <vector>

#include "deskorg/geometry.hpp"

namespace deskorg {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {a.x * s, a.y * s, a.z * s}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

// normal . p = offset, normal.z > 0.
struct PlaneModel {
  Vec3 normal{0, 0, 1};
  double offset = 0.0;

  double signed_distance(Vec3 p) const { return dot(normal, p) - offset; }

  // In-plane frame: u is world x projected onto the plane, v = n x u, origin
  // is the point of the plane closest to the world origin. For a horizontal
  // plane this is the world xy frame.
  Vec3 axis_u() const {
    Vec3 ex{1, 0, 0};
    Vec3 u = ex - normal * dot(ex, normal);
    if (norm(u) < 1e-9) u = Vec3{0, 1, 0} - normal * normal.y;
    return u * (1.0 / norm(u));
  }
  Vec3 axis_v() const { return cross(normal, axis_u()); }
  Vec3 origin() const { return normal * offset; }

  Point2 project(Vec3 p) const {
    const Vec3 d = p - origin();
    return {dot(d, axis_u()), dot(d, axis_v())};
  }
  Vec3 lift(Point2 q) const { return origin() + axis_u() * q.x + axis_v() * q.y; }

  friend bool operator==(const PlaneModel&, const PlaneModel&) = default;
};

struct TableModel {
  PlaneModel plane;
  Polygon support_polygon;  // table frame
  std::vector<Segment> edges;
  Segment dominant_edge;

  double height() const { return plane.offset / plane.normal.z; }

  friend bool operator==(const TableModel&, const TableModel&) = default;
};

// Longest edge wins. Edges within `tie_ratio` of the longest count as equally
// long (opposite sides of a rectangular desk measure slightly differently once
// the boundary is estimated) and the one whose midpoint is closest to
// `reference`, the robot base, is chosen.
inline Segment select_dominant_edge(const std::vector<Segment>& edges,
                                    Point2 reference = {0, 0},
                                    double tie_ratio = 0.05) {
  if (edges.empty()) throw Error(ErrorCode::degenerate_input, "no table edges");
  double longest = 0.0;
  for (const auto& e : edges) longest = std::max(longest, e.length());
  const Segment* best = nullptr;
  double best_d = 0.0;
  for (const auto& e : edges) {
    if (e.length() < longest * (1.0 - tie_ratio)) continue;
    const double d = distance(e.midpoint(), reference);
    if (!best || d < best_d - 1e-12) {
      best = &e;
      best_d = d;
    }
  }
  return *best;
}

// Edges of `poly` longer than `min_edge_length`, plus the dominant edge.
inline TableModel make_table(const PlaneModel& plane, const Polygon& support,
                             const Polygon& edge_source, double min_edge_length = 0.10) {
  TableModel t;
  t.plane = plane;
  t.support_polygon = support;
  for (std::size_t i = 0; i < edge_source.size(); ++i) {
    const Segment e = edge_source.edge(i);
    if (e.length() > min_edge_length) t.edges.push_back(e);
  }
  if (t.edges.empty()) {
    for (std::size_t i = 0; i < edge_source.size(); ++i) t.edges.push_back(edge_source.edge(i));
  }
  t.dominant_edge = select_dominant_edge(t.edges);
  return t;
}

// Ground-truth horizontal table at height z.
inline TableModel make_table(const Polygon& top, double z = 0.0) {
  return make_table(PlaneModel{{0, 0, 1}, z}, top, top);
}

}  // namespace deskorg
