#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "deskorg/primitives.hpp"
#include "deskorg/scene.hpp"
#include "deskorg/sim.hpp"

namespace deskorg {

enum class ActionKind { contact_grasp, push_grasp, pry_grasp, reorient, separation_push, place };

constexpr std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::contact_grasp: return "contact_grasp";
    case ActionKind::push_grasp: return "push_grasp";
    case ActionKind::pry_grasp: return "pry_grasp";
    case ActionKind::reorient: return "reorient";
    case ActionKind::separation_push: return "separation_push";
    case ActionKind::place: return "place";
  }
  return "unknown";
}

constexpr bool is_grasp(ActionKind k) {
  return k == ActionKind::contact_grasp || k == ActionKind::push_grasp || k == ActionKind::pry_grasp;
}

struct ReorientPayload {
  double target_yaw = 0.0;
  friend bool operator==(const ReorientPayload&, const ReorientPayload&) = default;
};
struct SeparationPayload {
  std::string neighbor_id;
  friend bool operator==(const SeparationPayload&, const SeparationPayload&) = default;
};
struct PlacePayload {
  PlaceTarget target = PlaceTarget::pen_holder;
  friend bool operator==(const PlacePayload&, const PlacePayload&) = default;
};

using ActionPayload = std::variant<ContactGraspPlan, PushGraspPlan, PryPlan, ReorientPayload,
                                   SeparationPayload, PlacePayload>;

struct PrimitiveAction {
  ActionKind kind;
  std::string object_id;
  ActionPayload payload;
  friend bool operator==(const PrimitiveAction&, const PrimitiveAction&) = default;
};

using Plan = std::vector<PrimitiveAction>;

struct Assignment {
  ActionKind grasp;
  bool reorient = false;
  PlaceTarget place = PlaceTarget::pen_holder;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

inline Assignment assignment_for(Category c) {
  switch (c) {
    case Category::pen:
    case Category::eraser:
    case Category::lead_case:
      return {ActionKind::contact_grasp, false, PlaceTarget::pen_holder};
    case Category::straight_ruler:
    case Category::triangle_ruler_30:
    case Category::triangle_ruler_45:
      return {ActionKind::push_grasp, false, PlaceTarget::pen_holder};
    case Category::paper:
      return {ActionKind::contact_grasp, true, PlaceTarget::aligned_pose};
    case Category::book:
      return {ActionKind::pry_grasp, true, PlaceTarget::stack_zone};
    case Category::pen_holder:
      break;
  }
  throw Error(ErrorCode::unknown_category, "no primitive for " + std::string(category_name(c)));
}

// Desk objects only; fixtures stay where they are.
inline std::map<std::string, Assignment> assign_primitives(const Scene& scene) {
  std::map<std::string, Assignment> out;
  for (const auto& o : scene.objects)
    if (o.location == Location::desk && !is_fixture(o.category)) out[o.id] = assignment_for(o.category);
  return out;
}

inline std::vector<std::string> order_objects(const Scene& scene) {
  const SupportGraph g = support_graph(scene);
  auto depth = [&](const std::string& id) {
    std::size_t d = 0;
    for (auto s = g.at(id); s; s = g.at(*s)) ++d;
    return d;
  };
  struct Key {
    std::size_t depth;
    int rank;
    std::string id;
  };
  std::vector<Key> smalls, rulers, deformables;
  bool ruler_first = false;
  for (const auto& o : scene.objects) {
    if (o.location != Location::desk || is_fixture(o.category)) continue;
    Key k{depth(o.id), o.category == Category::paper ? 0 : 1, o.id};
    if (is_small(o.category)) {
      smalls.push_back(k);
    } else if (is_ruler(o.category)) {
      rulers.push_back(k);
      // A ruler lying on a book (or a sheet) has to leave before its support.
      if (const auto& s = g.at(o.id); s && is_deformable(scene.at(*s).category)) ruler_first = true;
    } else {
      deformables.push_back(k);
    }
  }
  // Topmost first; paper before books at equal depth; then id.
  auto by_depth = [](const Key& a, const Key& b) {
    if (a.depth != b.depth) return a.depth > b.depth;
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.id < b.id;
  };
  std::sort(smalls.begin(), smalls.end(), by_depth);
  std::sort(rulers.begin(), rulers.end(), by_depth);
  std::sort(deformables.begin(), deformables.end(), by_depth);
  std::vector<std::string> out;
  for (const auto& k : smalls) out.push_back(k.id);
  const auto& second = ruler_first ? rulers : deformables;
  const auto& third = ruler_first ? deformables : rulers;
  for (const auto& k : second) out.push_back(k.id);
  for (const auto& k : third) out.push_back(k.id);
  return out;
}

// Same-layer desk neighbours of `id` closer than the separation threshold.
inline std::vector<std::string> crowding_neighbors(const Scene& scene, const std::string& id,
                                                   double threshold) {
  const ObjectState& o = scene.at(id);
  const Polygon w = o.world_footprint();
  std::vector<std::string> out;
  for (const auto& n : scene.objects) {
    if (n.id == id || n.location != Location::desk || is_fixture(n.category) || n.supported_by != o.supported_by)
      continue;
    if (polygon_distance(w, n.world_footprint()) < threshold) out.push_back(n.id);
  }
  return out;
}

// Pose payload for a grasp, computed against `scene`.
inline ActionPayload plan_grasp(const Scene& scene, ActionKind kind, const std::string& id,
                                const SimConfig& cfg) {
  const ObjectState& o = scene.at(id);
  switch (kind) {
    case ActionKind::contact_grasp: return plan_contact_grasp(o, scene, cfg.prim, GraspMode::contact);
    case ActionKind::push_grasp: return plan_push_grasp(o, scene, cfg.prim);
    case ActionKind::pry_grasp: return plan_pry_grasp(o, scene, scene.stack_zone, cfg.prim, cfg.tables);
    default: break;
  }
  throw Error(ErrorCode::degenerate_input, "not a grasp kind");
}

inline double reorient_target(const Scene& scene, const std::string& id) {
  const ObjectState& o = scene.at(id);
  const double axis = o.category == Category::paper ? scene.table.dominant_edge.angle() : scene.stack_zone.theta;
  return aligned_yaw(o.footprint, axis, o.pose.theta);
}

// Refreshes the payload of `a` against the live scene.
inline PrimitiveAction replan(const Scene& scene, const PrimitiveAction& a, const SimConfig& cfg) {
  PrimitiveAction out = a;
  if (is_grasp(a.kind))
    out.payload = plan_grasp(scene, a.kind, a.object_id, cfg);
  else if (a.kind == ActionKind::reorient)
    out.payload = ReorientPayload{reorient_target(scene, a.object_id)};
  return out;
}

// Runs one action against the simulator. Push-grasps are a push followed by
// a grasp replanned on the pushed scene.
inline ActionResult run_action(const Scene& scene, const PrimitiveAction& a, ExecMode mode,
                               const SimConfig& cfg, Rng& rng) {
  switch (a.kind) {
    case ActionKind::contact_grasp:
      return apply_grasp(scene, std::get<ContactGraspPlan>(a.payload), mode, cfg, rng);
    case ActionKind::pry_grasp:
      return apply_grasp(scene, std::get<PryPlan>(a.payload), mode, cfg, rng);
    case ActionKind::push_grasp: {
      ActionResult pushed = apply_push(scene, std::get<PushGraspPlan>(a.payload), cfg);
      if (!pushed.ok()) return pushed;
      // The grasp half keeps the push's support and edge; only the stamp moves on.
      PushGraspPlan again = std::get<PushGraspPlan>(a.payload);
      again.scene_stamp = scene_fingerprint(pushed.scene_after);
      return apply_grasp(pushed.scene_after, again, mode, cfg, rng);
    }
    case ActionKind::reorient:
      return apply_reorient(scene, std::get<ReorientPayload>(a.payload).target_yaw);
    case ActionKind::separation_push:
      return apply_separation_push(scene, a.object_id, std::get<SeparationPayload>(a.payload).neighbor_id, cfg);
    case ActionKind::place:
      return apply_place(scene, std::get<PlacePayload>(a.payload).target, cfg);
  }
  throw Error(ErrorCode::degenerate_input, "unknown action kind");
}

// Nominal dry run: payloads come from the simulated scene after the previous
// actions. A step that fails in the dry run is assumed to succeed so the rest
// of the plan can still be laid out.
inline Plan build_plan(const Scene& scene, const SimConfig& cfg) {
  const auto assign = assign_primitives(scene);
  Plan plan;
  Scene cur = scene;
  Rng rng(0);
  SimConfig nominal = cfg;
  nominal.noise_scale = 0.0;
  auto step = [&](PrimitiveAction a) {
    const ActionResult r = run_action(cur, a, ExecMode::deterministic, nominal, rng);
    plan.push_back(std::move(a));
    if (r.ok()) {
      cur = r.scene_after;
      return;
    }
    const PrimitiveAction& last = plan.back();
    if (is_grasp(last.kind)) {
      cur = detail::to_hand(cur, last.object_id, 0.0);
    } else if (last.kind == ActionKind::place) {
      cur.at(last.object_id).location = Location::stored;
      cur.in_hand.reset();
    }
  };
  for (const auto& id : order_objects(scene)) {
    const Assignment& as = assign.at(id);
    for (const auto& n : crowding_neighbors(cur, id, cfg.separation))
      step({ActionKind::separation_push, id, SeparationPayload{n}});
    step({as.grasp, id, plan_grasp(cur, as.grasp, id, cfg)});
    if (as.reorient) step({ActionKind::reorient, id, ReorientPayload{reorient_target(cur, id)}});
    step({ActionKind::place, id, PlacePayload{as.place}});
  }
  return plan;
}

struct FailureInfo {
  std::size_t action_index = 0;
  ActionKind kind = ActionKind::contact_grasp;
  std::string object_id;
  FailureCause cause = FailureCause::none;
  std::string detail;
  friend bool operator==(const FailureInfo&, const FailureInfo&) = default;
};

struct TaskReport {
  std::string scenario;
  ExecMode mode = ExecMode::deterministic;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::success;
  std::size_t total_actions = 0;
  std::size_t completed_actions = 0;
  std::optional<FailureInfo> failure;
  std::map<std::string, std::string> objects;  // id -> final status
  Scene final_scene;

  FailureCause cause() const { return failure ? failure->cause : FailureCause::none; }
};

inline FailureCause cause_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::edge_unreachable:
    case ErrorCode::no_support:
    case ErrorCode::no_overhang:
      return FailureCause::edge_unreachable;
    default:
      return FailureCause::infeasible;
  }
}

inline std::string object_status(const Scene& s, const ObjectState& o) {
  if (o.location == Location::stored) return "stored";
  if (o.location == Location::in_hand) return "in_hand";
  if (o.category == Category::book && distance(o.center(), s.stack_zone.position) < 1e-6) return "stacked";
  if (o.category == Category::paper && distance(o.center(), s.paper_zone.position) < 1e-6) return "aligned";
  return "on_desk";
}

inline void fill_statuses(TaskReport& r) {
  r.objects.clear();
  for (const auto& o : r.final_scene.objects)
    if (!is_fixture(o.category)) r.objects[o.id] = object_status(r.final_scene, o);
}

// Called with the action index and the scene after each successful action.
using StepObserver = std::function<void(std::size_t, const Scene&)>;

inline TaskReport execute(const Scene& scene, const Plan& plan, ExecMode mode, std::uint64_t seed,
                          const SimConfig& cfg, const StepObserver& observe = nullptr) {
  TaskReport r;
  r.scenario = scene.label;
  r.mode = mode;
  r.seed = seed;
  r.total_actions = plan.size();
  Rng rng(seed);
  Scene cur = scene;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const PrimitiveAction& a = plan[i];
    ActionResult res;
    try {
      res = run_action(cur, replan(cur, a, cfg), mode, cfg, rng);
    } catch (const Error& e) {
      res = detail::fail(cur, cause_for(e), e.what());
    }
    if (!res.ok()) {
      r.outcome = Outcome::failure;
      r.failure = FailureInfo{i, a.kind, a.object_id, res.cause, res.detail};
      r.final_scene = res.scene_after;
      fill_statuses(r);
      return r;
    }
    cur = std::move(res.scene_after);
    ++r.completed_actions;
    if (observe) observe(i, cur);
  }
  r.final_scene = std::move(cur);
  fill_statuses(r);
  return r;
}

// Build and execute; planning errors become a failure at action 0.
inline TaskReport run_episode(const Scene& scene, ExecMode mode, std::uint64_t seed, const SimConfig& cfg,
                              const Plan* prebuilt = nullptr, const StepObserver& observe = nullptr) {
  Plan plan;
  try {
    plan = prebuilt ? *prebuilt : build_plan(scene, cfg);
  } catch (const Error& e) {
    TaskReport r;
    r.scenario = scene.label;
    r.mode = mode;
    r.seed = seed;
    r.outcome = Outcome::failure;
    r.failure = FailureInfo{0, ActionKind::contact_grasp, "", cause_for(e), e.what()};
    r.final_scene = scene;
    fill_statuses(r);
    return r;
  }
  return execute(scene, plan, mode, seed, cfg, observe);
}

// Post-hoc geometric check: every object ended up in its target region.
inline std::optional<std::string> verify_organized(const Scene& s, double tol = 1e-6) {
  if (s.in_hand) return "'" + s.in_hand->id + "' is still in hand";
  for (const auto& o : s.objects) {
    if (is_fixture(o.category)) continue;
    if (is_small(o.category) || is_ruler(o.category)) {
      if (o.location != Location::stored) return "'" + o.id + "' is not in the pen holder";
      const Polygon w = o.world_footprint();
      for (const auto& v : w.vertices())
        if (!point_in_polygon(v, s.pen_holder_region)) return "'" + o.id + "' sticks out of the pen holder";
    } else if (o.category == Category::paper) {
      if (o.location != Location::desk || distance(o.center(), s.paper_zone.position) > tol)
        return "'" + o.id + "' is not at the paper zone";
      const double a = min_area_rect(o.world_footprint()).angle;
      if (std::abs(angle_diff_mod(a, s.table.dominant_edge.angle(), kPi)) > 1e-6)
        return "'" + o.id + "' is not parallel to the desk edge";
    } else if (o.category == Category::book) {
      if (o.location != Location::desk || distance(o.center(), s.stack_zone.position) > tol)
        return "'" + o.id + "' is not on the stack";
    }
  }
  return std::nullopt;
}

}  // namespace deskorg
