#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "deskorg/geometry.hpp"
#include "deskorg/rng.hpp"
#include "deskorg/table.hpp"

namespace deskorg {

enum class Category {
  pen,
  eraser,
  lead_case,
  straight_ruler,
  triangle_ruler_30,
  triangle_ruler_45,
  paper,
  book,
  pen_holder,
};

inline constexpr std::array<Category, 9> kAllCategories{
    Category::pen,           Category::eraser,          Category::lead_case,
    Category::straight_ruler, Category::triangle_ruler_30, Category::triangle_ruler_45,
    Category::paper,         Category::book,            Category::pen_holder};

constexpr std::string_view category_name(Category c) {
  switch (c) {
    case Category::pen: return "pen";
    case Category::eraser: return "eraser";
    case Category::lead_case: return "lead_case";
    case Category::straight_ruler: return "straight_ruler";
    case Category::triangle_ruler_30: return "triangle_ruler_30";
    case Category::triangle_ruler_45: return "triangle_ruler_45";
    case Category::paper: return "paper";
    case Category::book: return "book";
    case Category::pen_holder: return "pen_holder";
  }
  return "unknown";
}

inline Category parse_category(std::string_view s) {
  for (Category c : kAllCategories)
    if (category_name(c) == s) return c;
  throw Error(ErrorCode::unknown_category, "unknown category '" + std::string(s) + "'");
}

constexpr bool is_small(Category c) {
  return c == Category::pen || c == Category::eraser || c == Category::lead_case;
}
constexpr bool is_ruler(Category c) {
  return c == Category::straight_ruler || c == Category::triangle_ruler_30 ||
         c == Category::triangle_ruler_45;
}
constexpr bool is_triangular(Category c) {
  return c == Category::triangle_ruler_30 || c == Category::triangle_ruler_45;
}
constexpr bool is_deformable(Category c) { return c == Category::paper || c == Category::book; }
constexpr bool is_fixture(Category c) { return c == Category::pen_holder; }

struct RigidMaterial {
  friend bool operator==(const RigidMaterial&, const RigidMaterial&) = default;
};
struct PaperMaterial {
  double gsm = 80.0;
  friend bool operator==(const PaperMaterial&, const PaperMaterial&) = default;
};
struct BookMaterial {
  double thickness = 0.0;
  double spine_gap = 0.005;
  friend bool operator==(const BookMaterial&, const BookMaterial&) = default;
};
using Material = std::variant<RigidMaterial, PaperMaterial, BookMaterial>;

enum class Location { desk, in_hand, stored };

constexpr std::string_view location_name(Location l) {
  switch (l) {
    case Location::desk: return "desk";
    case Location::in_hand: return "in_hand";
    case Location::stored: return "stored";
  }
  return "unknown";
}

struct ObjectState {
  std::string id;
  Category category = Category::pen;
  Polygon footprint;  // body frame
  Pose2 pose;
  double height = 0.0;
  double mass = 0.0;
  Material material = RigidMaterial{};
  std::optional<std::string> supported_by;  // nullopt = DESKTOP
  Location location = Location::desk;

  Polygon world_footprint() const { return transform(footprint, pose); }
  // obj.pos: center of the minimum-area rectangle of the world footprint.
  Point2 center() const { return min_area_rect(world_footprint()).center; }

  double gsm() const {
    if (auto* p = std::get_if<PaperMaterial>(&material)) return p->gsm;
    return 0.0;
  }
  const BookMaterial* book() const { return std::get_if<BookMaterial>(&material); }

  friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

struct InHand {
  std::string id;
  double yaw_error = 0.0;
  std::optional<double> target_yaw;  // set by reorient
  friend bool operator==(const InHand&, const InHand&) = default;
};

struct Scene {
  std::string label;
  TableModel table;
  std::vector<ObjectState> objects;
  Polygon pen_holder_region;
  Pose2 stack_zone;
  Pose2 paper_zone;
  std::uint64_t rng_seed = 0;
  std::optional<InHand> in_hand;

  const ObjectState* find(std::string_view id) const {
    for (const auto& o : objects)
      if (o.id == id) return &o;
    return nullptr;
  }
  ObjectState* find(std::string_view id) {
    for (auto& o : objects)
      if (o.id == id) return &o;
    return nullptr;
  }
  const ObjectState& at(std::string_view id) const {
    if (const auto* o = find(id)) return *o;
    throw Error(ErrorCode::unknown_object, "no object '" + std::string(id) + "'");
  }
  ObjectState& at(std::string_view id) {
    if (auto* o = find(id)) return *o;
    throw Error(ErrorCode::unknown_object, "no object '" + std::string(id) + "'");
  }

  double table_z() const { return table.height(); }

  // Elevation of the object's underside, following the declared support chain.
  double base_z(const ObjectState& o) const {
    double z = table_z();
    const ObjectState* cur = &o;
    std::size_t guard = 0;
    while (cur->supported_by) {
      const ObjectState& s = at(*cur->supported_by);
      if (++guard > objects.size())
        throw Error(ErrorCode::cyclic_support, "support chain of '" + o.id + "' loops");
      z += s.height;
      cur = &s;
    }
    return z;
  }
  double top_z(const ObjectState& o) const { return base_z(o) + o.height; }

  std::size_t support_depth(const ObjectState& o) const {
    std::size_t d = 0;
    const ObjectState* cur = &o;
    while (cur->supported_by) {
      cur = &at(*cur->supported_by);
      if (++d > objects.size())
        throw Error(ErrorCode::cyclic_support, "support chain of '" + o.id + "' loops");
    }
    return d;
  }

  // Desk objects resting directly on `id`.
  std::vector<const ObjectState*> resting_on(std::string_view id) const {
    std::vector<const ObjectState*> out;
    for (const auto& o : objects)
      if (o.location == Location::desk && o.supported_by && *o.supported_by == id)
        out.push_back(&o);
    return out;
  }

  friend bool operator==(const Scene&, const Scene&) = default;
};

inline constexpr std::string_view kDesktop = "DESKTOP";

// object id -> supporter id (nullopt = DESKTOP), desk objects only.
using SupportGraph = std::map<std::string, std::optional<std::string>>;

// Supporter = topmost desk object below whose footprint contains the object's
// center. Elevations come from the declared chain, which must be acyclic.
inline SupportGraph support_graph(const Scene& scene) {
  std::map<std::string, double> base, top;
  for (const auto& o : scene.objects) {
    if (o.location != Location::desk) continue;
    base[o.id] = scene.base_z(o);
    top[o.id] = base[o.id] + o.height;
  }
  SupportGraph g;
  for (const auto& o : scene.objects) {
    if (o.location != Location::desk) continue;
    const Point2 c = o.center();
    std::optional<std::string> best;
    double best_top = -1e300;
    for (const auto& p : scene.objects) {
      if (p.location != Location::desk || p.id == o.id || is_fixture(p.category)) continue;
      if (top[p.id] > base[o.id] + 1e-9) continue;
      if (!point_in_polygon(c, p.world_footprint())) continue;
      if (top[p.id] > best_top + 1e-12 || (std::abs(top[p.id] - best_top) <= 1e-12 && best && p.id < *best)) {
        best_top = top[p.id];
        best = p.id;
      }
    }
    g[o.id] = best;
  }
  // The derived relation must itself be acyclic.
  for (const auto& [id, sup] : g) {
    std::set<std::string> seen{id};
    auto cur = sup;
    while (cur) {
      if (!seen.insert(*cur).second)
        throw Error(ErrorCode::cyclic_support, "support cycle through '" + id + "'");
      auto it = g.find(*cur);
      cur = it == g.end() ? std::nullopt : it->second;
    }
  }
  return g;
}

// Returns a description of the first violated invariant, or nullopt.
inline std::optional<std::string> check_scene_invariants(const Scene& scene) {
  std::set<std::string> ids;
  for (const auto& o : scene.objects) {
    if (!ids.insert(o.id).second) return "duplicate id '" + o.id + "'";
    if (o.footprint.size() < 3) return "object '" + o.id + "' has no footprint";
    if (!(o.height > 0.0)) return "object '" + o.id + "' has non-positive height";
  }
  for (const auto& o : scene.objects) {
    if (!o.supported_by) continue;
    const ObjectState* s = scene.find(*o.supported_by);
    if (!s) return "object '" + o.id + "' supported by unknown '" + *o.supported_by + "'";
    if (o.location == Location::desk && s->location != Location::desk)
      return "object '" + o.id + "' rests on '" + s->id + "' which is not on the desk";
    try {
      scene.base_z(o);
    } catch (const Error&) {
      return "support cycle through '" + o.id + "'";
    }
  }
  int in_hand = 0;
  for (const auto& o : scene.objects) in_hand += o.location == Location::in_hand;
  if (in_hand > 1) return "more than one object in hand";
  if (in_hand == 1 && (!scene.in_hand || scene.at(scene.in_hand->id).location != Location::in_hand))
    return "in-hand slot inconsistent";
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& a = scene.objects[i];
    if (a.location != Location::desk) continue;
    const Polygon wa = a.world_footprint();
    for (std::size_t j = i + 1; j < scene.objects.size(); ++j) {
      const auto& b = scene.objects[j];
      if (b.location != Location::desk || b.supported_by != a.supported_by) continue;
      const Polygon wb = convex_hull(b.world_footprint());
      if (intersection_area(wa, wb) >= 1e-8)
        return "objects '" + a.id + "' and '" + b.id + "' overlap";
    }
  }
  return std::nullopt;
}

// Hash of everything a primitive plan depends on; plans carry it to detect
// execution against a changed scene.
inline std::uint64_t scene_fingerprint(const Scene& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  auto mixd = [&](double d) { mix(std::bit_cast<std::uint64_t>(d)); };
  for (const auto& o : s.objects) {
    mix(hash_string(o.id));
    mix(static_cast<std::uint64_t>(o.location));
    mixd(o.pose.position.x);
    mixd(o.pose.position.y);
    mixd(o.pose.theta);
    mix(o.supported_by ? hash_string(*o.supported_by) : 0);
  }
  mix(s.in_hand ? hash_string(s.in_hand->id) : 0);
  return h;
}

}  // namespace deskorg
