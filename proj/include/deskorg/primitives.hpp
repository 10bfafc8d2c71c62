#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "deskorg/feasibility.hpp"
#include "deskorg/geometry.hpp"
#include "deskorg/scene.hpp"

namespace deskorg {

struct GripperModel {
  double finger_spacing_W0 = 0.030;
  double finger_length_L = 0.083;
  double open_deformation_Hmax = 0.033;
  double close_deformation_Hmin = 0.039;

  double max_span() const { return finger_spacing_W0 + 2.0 * open_deformation_Hmax; }
};

struct PrimitiveConfig {
  double theta_p = deg2rad(30.0);
  double theta_g = deg2rad(45.0);
  double overhang_delta = 0.015;
  double depth_mult_contact = 1.5;
  double depth_mult_noncontact = 0.5;
  double depth_mult_on_support = 1.0;
  double default_pry_alpha = deg2rad(9.0);
  double feasible_threshold = 0.9;
  double paper_grasp_offset = 0.070;
  double pry_pull_distance = 0.05;
  GripperModel gripper;

  void validate() const {
    auto angle_ok = [](double a) { return a > 0.0 && a < kPi / 2; };
    if (!angle_ok(theta_p) || !angle_ok(theta_g))
      throw Error(ErrorCode::degenerate_input, "tilt angles must lie in (0, pi/2)");
    if (!(depth_mult_contact > 0 && depth_mult_noncontact > 0 && depth_mult_on_support > 0))
      throw Error(ErrorCode::degenerate_input, "depth multipliers must be positive");
    if (!(overhang_delta > 0.0)) throw Error(ErrorCode::degenerate_input, "overhang must be positive");
    if (!(feasible_threshold >= 0.0 && feasible_threshold <= 1.0))
      throw Error(ErrorCode::degenerate_input, "threshold outside [0, 1]");
  }
};

struct ContactGraspPlan {
  std::string object_id;
  GripperPose grasp_pose;
  double depth = 0.0;  // fingertip target below the object top
  GraspMode mode = GraspMode::contact;
  double grasp_offset = 0.0;  // paper only: grasp position from the sheet edge
  std::uint64_t scene_stamp = 0;
  friend bool operator==(const ContactGraspPlan&, const ContactGraspPlan&) = default;
};

struct PushGraspPlan {
  std::string object_id;
  std::optional<std::string> support_id;  // nullopt = DESKTOP
  Vec2 direction_d;
  Point2 p_p_2d;
  Point2 p_g_2d;
  Segment target_edge;
  GripperPose push_start;
  GripperPose push_end;
  GripperPose grasp;
  std::uint64_t scene_stamp = 0;
  friend bool operator==(const PushGraspPlan&, const PushGraspPlan&) = default;
};

struct PryPlan {
  std::string object_id;
  GripperPose contact_pose;
  double opening_angle = 0.0;
  double alpha = 0.0;
  Vec2 pull_vector;
  Pose2 place_pose;
  std::uint64_t scene_stamp = 0;
  friend bool operator==(const PryPlan&, const PryPlan&) = default;
};

inline ContactGraspPlan plan_contact_grasp(const ObjectState& obj, const Scene& scene,
                                           const PrimitiveConfig& cfg,
                                           GraspMode mode = GraspMode::contact) {
  if (!is_small(obj.category) && obj.category != Category::paper)
    throw Error(ErrorCode::unsupported_category,
                "contact grasp does not handle " + std::string(category_name(obj.category)));
  const OrientedRect r = min_area_rect(obj.world_footprint());
  double mult = cfg.depth_mult_noncontact;
  if (mode == GraspMode::contact)
    mult = obj.supported_by ? cfg.depth_mult_on_support : cfg.depth_mult_contact;
  ContactGraspPlan p;
  p.object_id = obj.id;
  p.mode = mode;
  p.depth = mult * obj.height;
  p.grasp_pose = {r.center.x, r.center.y, scene.top_z(obj) - p.depth, r.angle, 0.0};
  if (obj.category == Category::paper) p.grasp_offset = cfg.paper_grasp_offset;
  p.scene_stamp = scene_fingerprint(scene);
  return p;
}

struct PushDirection {
  Vec2 d;
  Segment target_edge;
  std::size_t edge_index = 0;
};

// Body axis (long or short, signed toward the nearest support edge) best
// aligned with that edge's outward normal. At 45 degrees the axis whose ray
// leaves the support sooner wins, then the long axis.
inline PushDirection push_direction_detailed(double obj_theta, const Polygon& support,
                                             Point2 obj_pos) {
  const NearestEdge ne = nearest_edge(support, obj_pos);
  const Vec2 n = ne.segment.outward_normal();
  Vec2 axes[2] = {unit(obj_theta), perp(unit(obj_theta))};
  double score[2];
  for (auto& a : axes) {
    if (dot(a, n) < 0.0) a = a * -1.0;
  }
  for (int i = 0; i < 2; ++i) score[i] = dot(axes[i], n);
  int pick = 0;
  if (score[1] > score[0] + 1e-9) {
    pick = 1;
  } else if (std::abs(score[1] - score[0]) <= 1e-9) {
    const double d0 = ray_exit(support, obj_pos, axes[0]).first;
    const double d1 = ray_exit(support, obj_pos, axes[1]).first;
    if (d1 < d0 - 1e-12) pick = 1;
  }
  return {axes[pick], ne.segment, ne.index};
}

inline std::pair<Vec2, Segment> push_direction(double obj_theta, const Polygon& support,
                                               Point2 obj_pos) {
  const auto r = push_direction_detailed(obj_theta, support, obj_pos);
  return {r.d, r.target_edge};
}

// Support for a push: the highest book or sheet under the object's center,
// else the desktop.
inline std::optional<std::string> push_support(const ObjectState& obj, const Scene& scene) {
  const Point2 c = obj.center();
  const double base = scene.base_z(obj);
  std::optional<std::string> best;
  double best_top = -1e300;
  for (const auto& s : scene.objects) {
    if (s.id == obj.id || s.location != Location::desk || !is_deformable(s.category)) continue;
    const double top = scene.top_z(s);
    if (top > base + 1e-9 || !point_in_polygon(c, s.world_footprint())) continue;
    if (top > best_top + 1e-12 || (std::abs(top - best_top) <= 1e-12 && s.id < *best)) {
      best = s.id;
      best_top = top;
    }
  }
  return best;
}

inline Polygon support_polygon(const Scene& scene, const std::optional<std::string>& id) {
  if (!id) return scene.table.support_polygon;
  return scene.at(*id).world_footprint();
}

inline PushGraspPlan plan_push_grasp(const ObjectState& obj, const Scene& scene,
                                     const PrimitiveConfig& cfg) {
  if (!is_ruler(obj.category))
    throw Error(ErrorCode::unsupported_category,
                "push-grasp needs a ruler, got " + std::string(category_name(obj.category)));
  const OrientedRect rect = min_area_rect(obj.world_footprint());
  const Point2 pos = rect.center;
  PushGraspPlan p;
  p.object_id = obj.id;
  p.support_id = push_support(obj, scene);
  const Polygon S = support_polygon(scene, p.support_id);
  if (!point_in_polygon(pos, S))
    throw Error(ErrorCode::no_support, "'" + obj.id + "' is not over any support");

  const PushDirection pd = push_direction_detailed(rect.angle, S, pos);
  p.direction_d = pd.d;
  p.target_edge = pd.target_edge;
  p.p_g_2d = foot_of_perpendicular(pos, pd.target_edge);

  const auto centers = rect.edge_centers();
  std::size_t far = 0;
  for (std::size_t i = 1; i < centers.size(); ++i)
    if (distance(centers[i], p.p_g_2d) > distance(centers[far], p.p_g_2d) + 1e-12) far = i;
  p.p_p_2d = centers[far];

  if (!point_in_polygon(p.p_p_2d, S))
    throw Error(ErrorCode::edge_unreachable, "push start of '" + obj.id + "' is off its support");
  const Vec2 path = p.p_g_2d - p.p_p_2d;
  const double len = norm(path);
  if (len > kGeomTol) {
    const auto [exit, idx] = ray_exit(S, p.p_p_2d, path * (1.0 / len));
    if (idx != pd.edge_index && exit < len - 1e-9)
      throw Error(ErrorCode::edge_unreachable,
                  "push path of '" + obj.id + "' leaves the support before the target edge");
  }

  // Body long axis, oriented to agree with d (d to its left when they are
  // perpendicular) so that the pose is defined modulo 2 pi.
  Vec2 u = rect.major_axis();
  const double ud = dot(u, pd.d);
  if (ud < -1e-12 || (std::abs(ud) <= 1e-12 && cross(u, pd.d) < 0.0)) u = u * -1.0;
  const double yaw_p = angle_of(u);
  const double r = dot(u, pd.d) > 1e-12 ? -1.0 : 1.0;  // lean against d
  const double z = scene.top_z(obj);
  p.push_start = {p.p_p_2d.x, p.p_p_2d.y, z, yaw_p, r * cfg.theta_p};
  p.push_end = p.push_start;
  p.push_end.x = p.p_g_2d.x;
  p.push_end.y = p.p_g_2d.y;
  p.grasp = {p.p_g_2d.x, p.p_g_2d.y, z, pd.target_edge.angle(), r * cfg.theta_g};
  p.scene_stamp = scene_fingerprint(scene);
  return p;
}

// Body-frame spine edge: the footprint edge with the lowest midpoint y.
inline Segment book_spine_body(const ObjectState& book) {
  const Polygon& f = book.footprint;
  std::size_t best = 0;
  for (std::size_t i = 1; i < f.size(); ++i)
    if (f.edge(i).midpoint().y < f.edge(best).midpoint().y - 1e-12) best = i;
  return f.edge(best);
}

inline PryPlan plan_pry_grasp(const ObjectState& book, const Scene& scene, const Pose2& stack_target,
                              const PrimitiveConfig& cfg, const FeasibilityTables& tables) {
  const BookMaterial* m = book.book();
  if (book.category != Category::book || !m)
    throw Error(ErrorCode::unsupported_category, "pry grasp needs a book");
  const auto band = pry_feasible_band(tables, m->thickness, cfg.feasible_threshold);
  if (!band)
    throw Error(ErrorCode::infeasible_thickness,
                "no prying angle reaches the threshold for thickness " + std::to_string(m->thickness));
  const Segment spine_b = book_spine_body(book);
  const Point2 mid = book.pose.apply(spine_b.midpoint());
  const Vec2 out = rotate(spine_b.outward_normal(), book.pose.theta);
  PryPlan p;
  p.object_id = book.id;
  p.opening_angle = std::atan2(m->thickness, cfg.gripper.finger_spacing_W0);
  p.contact_pose = {mid.x, mid.y, scene.base_z(book) + m->spine_gap, angle_of(out), 0.0};
  p.alpha = std::clamp(cfg.default_pry_alpha, band->first, band->second);
  p.pull_vector = out * cfg.pry_pull_distance;
  p.place_pose = stack_target;
  p.scene_stamp = scene_fingerprint(scene);
  return p;
}

}  // namespace deskorg
