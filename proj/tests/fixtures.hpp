#pragma once
// Scene builders and plan checkers shared by unit tests and the acceptance run.

#include <cmath>
#include <optional>
#include <string>

#include "deskorg/materials.hpp"
#include "deskorg/primitives.hpp"
#include "deskorg/scenario.hpp"

namespace fixture {

using namespace deskorg;

inline ObjectState make(Category c, std::string id, Polygon fp, double h) {
  ObjectState o;
  o.id = std::move(id);
  o.category = c;
  o.footprint = std::move(fp);
  o.height = h;
  if (c == Category::paper) o.material = PaperMaterial{70.0};
  if (c == Category::book) o.material = BookMaterial{h, 0.3 * h};
  return o;
}

inline ObjectState place(ObjectState o, Point2 c, double theta, std::optional<std::string> on = std::nullopt) {
  o.pose = Pose2(c, theta);
  o.supported_by = std::move(on);
  return o;
}

// Uniform point inside a convex polygon, pulled toward its centroid by `shrink`.
inline Point2 point_inside(const Polygon& p, Rng& rng, double shrink = 0.9) {
  const OrientedRect r = min_area_rect(p);
  const Point2 c = p.centroid();
  for (int i = 0; i < 1000; ++i) {
    const Point2 q = r.center + r.major_axis() * rng.uniform(-r.half_a, r.half_a) +
                     r.minor_axis() * rng.uniform(-r.half_b, r.half_b);
    const Point2 s = c + (q - c) * shrink;
    if (point_in_polygon(s, p)) return s;
  }
  return c;
}

// One ruler resting on the desktop or on a book. The table is the standard
// desk, a rotated rectangle or a random convex polygon.
inline Scene random_push_scene(Rng& rng) {
  Scene s;
  const double kind = rng.uniform();
  if (kind < 0.4) {
    s = empty_desk();
  } else {
    Polygon top;
    if (kind < 0.7) {
      top = transform(rect_footprint(rng.uniform(0.4, 1.6), rng.uniform(0.3, 1.0)),
                      Pose2({rng.uniform(-0.5, 0.5), rng.uniform(0.2, 1.0)}, rng.uniform(-kPi, kPi)));
    } else {
      std::vector<Point2> pts;
      const std::size_t n = 5 + rng.index(10);
      const Point2 c{rng.uniform(-0.5, 0.5), rng.uniform(0.2, 1.0)};
      for (std::size_t i = 0; i < n; ++i) {
        const double t = 2 * kPi * (i + rng.uniform(0.0, 0.8)) / static_cast<double>(n);
        const double rad = rng.uniform(0.35, 0.6);
        pts.push_back(c + Vec2{rad * std::cos(t), 0.8 * rad * std::sin(t)});
      }
      top = convex_hull(pts);
    }
    s.table = make_table(top, rng.uniform(0.0, 0.8));
    s.pen_holder_region = rect_footprint(0.2, 0.1);
  }
  const Category rulers[3] = {Category::straight_ruler, Category::triangle_ruler_30, Category::triangle_ruler_45};
  ObjectState ruler = sample_object(rulers[rng.index(3)], "ruler", rng);
  const double yaw = rng.uniform(-kPi, kPi);
  if (rng.bernoulli(0.5)) {
    ObjectState book = sample_object(Category::book, "book", rng);
    book = place(book, point_inside(s.table.support_polygon, rng, 0.6), rng.uniform(-kPi, kPi));
    s.objects.push_back(book);
    const Polygon bw = s.objects.back().world_footprint();
    s.objects.push_back(place(ruler, point_inside(bw, rng, 0.8), yaw, "book"));
  } else {
    s.objects.push_back(place(ruler, point_inside(s.table.support_polygon, rng, 0.9), yaw));
  }
  return s;
}

// Independent checks of a push-grasp plan. Returns the first violated
// property, if any.
inline std::optional<std::string> check_push_plan(const PushGraspPlan& p, const Scene& s, double tol = 1e-9) {
  const ObjectState& obj = s.at(p.object_id);
  const OrientedRect rect = min_area_rect(obj.world_footprint());
  const Polygon S = p.support_id ? s.at(*p.support_id).world_footprint() : s.table.support_polygon;

  bool is_edge = false;
  for (std::size_t i = 0; i < S.size(); ++i) {
    const Segment e = S.edge(i);
    if (distance(e.p0, p.target_edge.p0) < tol && distance(e.p1, p.target_edge.p1) < tol) is_edge = true;
  }
  if (!is_edge) return "target edge is not an edge of the support";
  if (point_segment_distance(p.p_g_2d, p.target_edge.p0, p.target_edge.p1) > tol) return "p_g off the target edge";

  const Vec2 ev = p.target_edge.vector();
  const double t = dot(rect.center - p.target_edge.p0, ev) / dot(ev, ev);
  if (t > 1e-9 && t < 1 - 1e-9) {
    const Vec2 w = rect.center - p.p_g_2d;
    if (std::abs(dot(w, ev)) / norm(ev) > tol) return "p_g not the perpendicular foot";
  }
  if (p.push_start.yaw != p.push_end.yaw || p.push_start.tilt != p.push_end.tilt)
    return "push end orientation differs from push start";
  if (p.push_end.x != p.p_g_2d.x || p.push_end.y != p.p_g_2d.y) return "push end not at p_g";

  double best = -1.0;
  bool listed = false;
  for (const Point2 c : rect.edge_centers()) {
    best = std::max(best, distance(c, p.p_g_2d));
    if (distance(c, p.p_p_2d) < tol) listed = true;
  }
  if (!listed) return "p_p is not a min-rect edge center";
  if (distance(p.p_p_2d, p.p_g_2d) < best - tol) return "p_p does not maximize distance to p_g";

  if (std::abs(norm(p.direction_d) - 1.0) > 1e-9) return "d is not a unit vector";
  const double c = std::abs(dot(p.direction_d, rect.major_axis()));
  if (std::abs(c - 1.0) > 1e-9 && c > 1e-9) return "d is not a body axis";
  if (dot(p.direction_d, p.target_edge.outward_normal()) <= 0.0) return "d points away from the target edge";
  return std::nullopt;
}

}  // namespace fixture
