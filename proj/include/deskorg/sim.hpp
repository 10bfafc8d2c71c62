#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "deskorg/feasibility.hpp"
#include "deskorg/primitives.hpp"
#include "deskorg/rng.hpp"
#include "deskorg/scene.hpp"

namespace deskorg {

enum class Outcome { success, failure };
enum class FailureCause { none, infeasible, cograsp, placement_out_of_region, collision, edge_unreachable };
enum class ExecMode { deterministic, stochastic };
enum class PlaceTarget { pen_holder, stack_zone, aligned_pose };

constexpr std::string_view to_string(Outcome o) { return o == Outcome::success ? "success" : "failure"; }
constexpr std::string_view to_string(FailureCause c) {
  switch (c) {
    case FailureCause::none: return "none";
    case FailureCause::infeasible: return "infeasible";
    case FailureCause::cograsp: return "cograsp";
    case FailureCause::placement_out_of_region: return "placement_out_of_region";
    case FailureCause::collision: return "collision";
    case FailureCause::edge_unreachable: return "edge_unreachable";
  }
  return "none";
}
constexpr std::string_view to_string(ExecMode m) {
  return m == ExecMode::deterministic ? "deterministic" : "stochastic";
}
constexpr std::string_view to_string(PlaceTarget t) {
  switch (t) {
    case PlaceTarget::pen_holder: return "pen_holder";
    case PlaceTarget::stack_zone: return "stack_zone";
    case PlaceTarget::aligned_pose: return "aligned_pose";
  }
  return "pen_holder";
}

struct SimConfig {
  FeasibilityTables tables = FeasibilityTables::calibrated();
  PrimitiveConfig prim;
  double tri_yaw_sigma = deg2rad(6.0);  // in-hand yaw noise, triangular rulers
  double noise_scale = 0.0;             // multiplies every noise sigma
  double separation = 0.010;
  double stack_tolerance = 0.005;
  double overlap_area = 1e-8;
};

struct ActionResult {
  Outcome outcome = Outcome::success;
  FailureCause cause = FailureCause::none;
  Scene scene_after;
  std::string detail;

  bool ok() const { return outcome == Outcome::success; }
};

using GraspPlan = std::variant<ContactGraspPlan, PushGraspPlan, PryPlan>;

namespace detail {

inline ActionResult succeed(Scene s, std::string detail = {}) {
  return {Outcome::success, FailureCause::none, std::move(s), std::move(detail)};
}
inline ActionResult fail(const Scene& s, FailureCause c, std::string detail) {
  return {Outcome::failure, c, s, std::move(detail)};
}

inline void check_stamp(const Scene& s, std::uint64_t stamp, std::string_view what) {
  if (scene_fingerprint(s) != stamp)
    throw Error(ErrorCode::stale_plan, std::string(what) + " plan was made for a different scene");
}

inline const ObjectState& desk_object(const Scene& s, std::string_view id) {
  const ObjectState& o = s.at(id);
  if (o.location != Location::desk)
    throw Error(ErrorCode::unknown_object, "'" + o.id + "' is not on the desk");
  return o;
}

// Ids of `id` and everything resting on it, transitively.
inline std::vector<std::string> with_dependents(const Scene& s, const std::string& id) {
  std::vector<std::string> out{id};
  for (std::size_t i = 0; i < out.size(); ++i)
    for (const auto* o : s.resting_on(out[i])) out.push_back(o->id);
  return out;
}

// First same-layer desk object (excluding `skip`) overlapping `region`.
inline std::optional<std::string> first_overlap(const Scene& s, const Polygon& convex_region,
                                                const std::optional<std::string>& layer,
                                                const std::vector<std::string>& skip,
                                                double min_area) {
  for (const auto& o : s.objects) {
    if (o.location != Location::desk || is_fixture(o.category) || o.supported_by != layer) continue;
    if (std::find(skip.begin(), skip.end(), o.id) != skip.end()) continue;
    if (intersection_area(o.world_footprint(), convex_region) > min_area) return o.id;
  }
  return std::nullopt;
}

inline Polygon supporter_polygon(const Scene& s, const ObjectState& o) {
  return o.supported_by ? s.at(*o.supported_by).world_footprint() : s.table.support_polygon;
}

// Largest signed distance of the footprint past the edge line.
inline double overhang(const Polygon& world, const Segment& edge) {
  const Vec2 n = edge.outward_normal();
  double m = -1e300;
  for (const auto& v : world.vertices()) m = std::max(m, dot(v - edge.p0, n));
  return m;
}

inline bool decide(double p, ExecMode mode, double threshold, Rng& rng) {
  if (mode == ExecMode::stochastic) return rng.bernoulli(p);
  return p >= threshold;
}

inline Scene to_hand(Scene s, const std::string& id, double yaw_error) {
  ObjectState& o = s.at(id);
  o.location = Location::in_hand;
  o.supported_by.reset();
  s.in_hand = InHand{id, yaw_error, std::nullopt};
  return s;
}

// Topmost desk object whose footprint contains `p`, fixtures excluded.
inline std::optional<std::string> topmost_at(const Scene& s, Point2 p, std::string_view skip) {
  std::optional<std::string> best;
  double best_top = -1e300;
  for (const auto& o : s.objects) {
    if (o.location != Location::desk || is_fixture(o.category) || o.id == skip) continue;
    if (!point_in_polygon(p, o.world_footprint())) continue;
    const double top = s.top_z(o);
    if (top > best_top + 1e-12 || (std::abs(top - best_top) <= 1e-12 && o.id < *best)) {
      best = o.id;
      best_top = top;
    }
  }
  return best;
}

}  // namespace detail

// Quasi-static translation along d until the leading point overhangs the
// target edge by the configured margin.
inline ActionResult apply_push(const Scene& scene, const PushGraspPlan& plan, const SimConfig& cfg) {
  detail::check_stamp(scene, plan.scene_stamp, "push");
  const ObjectState& obj = detail::desk_object(scene, plan.object_id);
  const Polygon S = support_polygon(scene, plan.support_id);
  const Vec2 n = plan.target_edge.outward_normal();
  const double dn = dot(plan.direction_d, n);
  if (dn <= 1e-12)
    return detail::fail(scene, FailureCause::edge_unreachable, "push direction does not approach the edge");
  const Polygon world = obj.world_footprint();
  const double s = std::max(0.0, (cfg.prim.overhang_delta - detail::overhang(world, plan.target_edge)) / dn);
  if (s == 0.0) return detail::succeed(scene, "already overhanging");
  const Vec2 t = plan.direction_d * s;

  const auto movers = detail::with_dependents(scene, obj.id);
  const Polygon swept = swept_hull(convex_hull(world), t);
  if (auto hit = detail::first_overlap(scene, swept, obj.supported_by, movers, cfg.overlap_area))
    return detail::fail(scene, FailureCause::collision, "push of '" + obj.id + "' hits '" + *hit + "'");

  const Polygon moved = translate(world, t);
  // Whatever leaves the support must leave across the target edge.
  const double outside = moved.area() - intersection_area(moved, S);
  const Segment& e = plan.target_edge;
  const Vec2 along = e.direction() * 10.0;
  const Polygon far_side = Polygon::trusted({e.p0 - along, e.p0 - along + n * 10.0, e.p1 + along + n * 10.0, e.p1 + along});
  const auto beyond = clip_convex(moved.vertices(), far_side);
  const double beyond_area = beyond.size() < 3 ? 0.0 : std::abs(signed_area(beyond));
  if (outside > beyond_area + 1e-8)
    return detail::fail(scene, FailureCause::edge_unreachable, "push of '" + obj.id + "' leaves the support sideways");

  Scene out = scene;
  for (const auto& id : movers) out.at(id).pose.position = out.at(id).pose.position + t;
  return detail::succeed(std::move(out));
}

inline double in_hand_yaw_sigma(const ObjectState& o, const SimConfig& cfg) {
  return is_triangular(o.category) ? cfg.tri_yaw_sigma * cfg.noise_scale : 0.0;
}

inline ActionResult apply_grasp(const Scene& scene, const GraspPlan& plan, ExecMode mode,
                                const SimConfig& cfg, Rng& rng) {
  if (scene.in_hand) throw Error(ErrorCode::degenerate_input, "hand is already holding '" + scene.in_hand->id + "'");
  const double thr = cfg.prim.feasible_threshold;
  auto finish = [&](const ObjectState& o, double p, std::string what) {
    if (!detail::decide(p, mode, thr, rng))
      return detail::fail(scene, FailureCause::infeasible, what + " of '" + o.id + "' failed");
    const double sigma = in_hand_yaw_sigma(o, cfg);
    const double err = sigma > 0.0 ? sigma * rng.normal() : 0.0;
    return detail::succeed(detail::to_hand(scene, o.id, err));
  };

  if (const auto* cg = std::get_if<ContactGraspPlan>(&plan)) {
    detail::check_stamp(scene, cg->scene_stamp, "contact grasp");
    const ObjectState& o = detail::desk_object(scene, cg->object_id);
    if (!scene.resting_on(o.id).empty())
      return detail::fail(scene, FailureCause::infeasible, "'" + o.id + "' is covered");
    if (o.supported_by && cg->depth > o.height + 1e-12)
      return detail::fail(scene, FailureCause::cograsp,
                          "fingers reach below '" + o.id + "' into '" + *o.supported_by + "'");
    const Polygon w = o.world_footprint();
    for (const auto& n : scene.objects) {
      if (n.id == o.id || n.location != Location::desk || is_fixture(n.category) || n.supported_by != o.supported_by)
        continue;
      if (polygon_distance(w, n.world_footprint()) < cfg.separation - 1e-9)
        return detail::fail(scene, FailureCause::collision, "fingers of '" + o.id + "' grasp hit '" + n.id + "'");
    }
    double p;
    if (o.category == Category::paper)
      p = paper_grasp_feasible(cfg.tables, o.gsm(), cg->grasp_offset) ? 1.0 : 0.0;
    else
      p = contact_grasp_probability(cfg.tables, cg->mode, o.height).probability;
    return finish(o, p, "contact grasp");
  }

  if (const auto* pg = std::get_if<PushGraspPlan>(&plan)) {
    detail::check_stamp(scene, pg->scene_stamp, "push-grasp");
    const ObjectState& o = detail::desk_object(scene, pg->object_id);
    SupportKind sk = SupportKind::desktop;
    if (pg->support_id) {
      const Category c = scene.at(*pg->support_id).category;
      sk = c == Category::paper ? SupportKind::paper : SupportKind::book;
    }
    if (sk == SupportKind::paper)
      return detail::fail(scene, FailureCause::cograsp,
                          "push-grasp of '" + o.id + "' takes the sheet '" + *pg->support_id + "' with it");
    if (detail::overhang(o.world_footprint(), pg->target_edge) < cfg.prim.overhang_delta - 1e-9)
      throw Error(ErrorCode::no_overhang, "'" + o.id + "' does not overhang its support edge");
    const RulerKind rk = is_triangular(o.category) ? RulerKind::triangular : RulerKind::straight;
    return finish(o, push_grasp_probability(cfg.tables, rk, sk).probability, "push-grasp");
  }

  const auto& pp = std::get<PryPlan>(plan);
  detail::check_stamp(scene, pp.scene_stamp, "pry");
  const ObjectState& o = detail::desk_object(scene, pp.object_id);
  if (!scene.resting_on(o.id).empty())
    return detail::fail(scene, FailureCause::infeasible, "'" + o.id + "' is covered");
  const BookMaterial* m = o.book();
  if (!m) throw Error(ErrorCode::unsupported_category, "pry grasp needs a book");
  return finish(o, pry_probability(cfg.tables, m->thickness, pp.alpha).probability, "pry grasp");
}

inline ActionResult apply_reorient(const Scene& scene, double target_yaw) {
  if (!scene.in_hand) throw Error(ErrorCode::nothing_in_hand, "reorient with an empty hand");
  Scene out = scene;
  out.in_hand->target_yaw = normalize_angle(target_yaw);
  return detail::succeed(std::move(out));
}

// Yaw that puts the body min-rect long axis along `axis_angle`, nearest to `current`.
inline double aligned_yaw(const Polygon& body, double axis_angle, double current) {
  const double base = axis_angle - min_area_rect(body).angle;
  const double k = std::round((current - base) / kPi);
  return normalize_angle(base + k * kPi);
}

inline ActionResult apply_place(const Scene& scene, PlaceTarget target, const SimConfig& cfg) {
  if (!scene.in_hand) throw Error(ErrorCode::nothing_in_hand, "place with an empty hand");
  const InHand& h = *scene.in_hand;
  const ObjectState& o = scene.at(h.id);
  const Point2 body_c = min_area_rect(o.footprint).center;

  Point2 at;
  double yaw;
  if (target == PlaceTarget::pen_holder) {
    const OrientedRect region = min_area_rect(scene.pen_holder_region);
    at = region.center;
    yaw = aligned_yaw(o.footprint, region.angle, 0.0);
  } else {
    const Pose2& zone = target == PlaceTarget::stack_zone ? scene.stack_zone : scene.paper_zone;
    at = zone.position;
    yaw = h.target_yaw ? *h.target_yaw : zone.theta;
  }
  yaw = normalize_angle(yaw + h.yaw_error);
  // The grasp point (body min-rect center) lands on the target point.
  const Pose2 pose(at - rotate(body_c, yaw), yaw);
  const Polygon world = transform(o.footprint, pose);

  Scene out = scene;
  ObjectState& po = out.at(h.id);
  if (target == PlaceTarget::pen_holder) {
    for (const auto& v : world.vertices())
      if (!point_in_polygon(v, scene.pen_holder_region))
        return detail::fail(scene, FailureCause::placement_out_of_region,
                            "'" + o.id + "' sticks out of the pen holder");
    po.pose = pose;
    po.location = Location::stored;
  } else {
    const auto sup = detail::topmost_at(scene, at, o.id);
    if (auto hit = detail::first_overlap(scene, convex_hull(world), sup, {o.id}, cfg.overlap_area))
      return detail::fail(scene, FailureCause::collision, "placing '" + o.id + "' hits '" + *hit + "'");
    if (target == PlaceTarget::stack_zone && sup) {
      const ObjectState& below = scene.at(*sup);
      const OrientedRect a = min_area_rect(world), b = min_area_rect(below.world_footprint());
      const double dyaw = std::abs(angle_diff_mod(a.angle, b.angle, kPi));
      const double mis = distance(a.center, b.center) + std::hypot(a.half_a, a.half_b) * dyaw;
      if (mis > cfg.stack_tolerance + 1e-12)
        return detail::fail(scene, FailureCause::placement_out_of_region,
                            "'" + o.id + "' is misaligned on '" + below.id + "'");
    }
    po.pose = pose;
    po.location = Location::desk;
    po.supported_by = sup;
  }
  out.in_hand.reset();
  return detail::succeed(std::move(out));
}

// Moves `neighbor_id` (and whatever rests on it) straight away from `obj_id`
// until their footprints are at least the separation threshold apart.
inline ActionResult apply_separation_push(const Scene& scene, const std::string& obj_id,
                                          const std::string& neighbor_id, const SimConfig& cfg) {
  const ObjectState& a = detail::desk_object(scene, obj_id);
  const ObjectState& b = detail::desk_object(scene, neighbor_id);
  const Polygon wa = a.world_footprint(), wb = b.world_footprint();
  const double thr = cfg.separation;
  if (polygon_distance(wa, wb) >= thr) return detail::succeed(scene, "already separated");
  Vec2 dir = b.center() - a.center();
  dir = norm(dir) > kGeomTol ? normalized(dir) : Vec2{1.0, 0.0};
  auto clear = [&](double t) { return polygon_distance(wa, translate(wb, dir * t)) >= thr; };
  double lo = 0.0, hi = thr;
  while (!clear(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 10.0) return detail::fail(scene, FailureCause::collision, "cannot separate '" + b.id + "'");
  }
  for (int i = 0; i < 60 && hi - lo > 1e-7; ++i) {
    const double mid = 0.5 * (lo + hi);
    (clear(mid) ? hi : lo) = mid;
  }
  const Vec2 t = dir * hi;

  auto movers = detail::with_dependents(scene, b.id);
  auto skip = movers;
  skip.push_back(a.id);
  if (auto hit = detail::first_overlap(scene, swept_hull(convex_hull(wb), t), b.supported_by, skip, cfg.overlap_area))
    return detail::fail(scene, FailureCause::collision, "separating '" + b.id + "' hits '" + *hit + "'");
  if (!point_in_polygon(b.center() + t, detail::supporter_polygon(scene, b)))
    return detail::fail(scene, FailureCause::edge_unreachable, "separating '" + b.id + "' pushes it off its support");

  Scene out = scene;
  for (const auto& id : movers) out.at(id).pose.position = out.at(id).pose.position + t;
  return detail::succeed(std::move(out));
}

}  // namespace deskorg
