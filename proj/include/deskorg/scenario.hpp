#pragma once

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deskorg/materials.hpp"
#include "deskorg/rng.hpp"
#include "deskorg/scene.hpp"
#include "deskorg/table.hpp"

namespace deskorg {

// Cxyz: x categories, combination y, layout z.
struct CxyzSpec {
  int x = 2;
  int y = 1;
  int z = 1;

  std::string label() const {
    return "C" + std::to_string(x) + std::to_string(y) + std::to_string(z);
  }
  friend bool operator==(const CxyzSpec&, const CxyzSpec&) = default;
};

inline CxyzSpec parse_spec(std::string_view s) {
  if (s.size() != 4 || (s[0] != 'C' && s[0] != 'c') || !std::isdigit(static_cast<unsigned char>(s[1])) ||
      !std::isdigit(static_cast<unsigned char>(s[2])) || !std::isdigit(static_cast<unsigned char>(s[3])))
    throw Error(ErrorCode::unknown_spec, "'" + std::string(s) + "' is not of the form Cxyz");
  CxyzSpec c{s[1] - '0', s[2] - '0', s[3] - '0'};
  if (c.x < 2 || c.x > 5 || c.y < 1 || c.y > 3 || c.z < 1 || c.z > 3)
    throw Error(ErrorCode::unknown_spec, "no scenario " + std::string(s));
  return c;
}

// Desk and zone geometry shared by every generated scene. The robot base is at
// the origin; the desk's front edge runs along y = 0.2.
struct DeskLayout {
  double width = 1.2;
  double depth = 0.8;
  Point2 center{0.0, 0.6};
  // Free placement area for objects.
  double x_lo = -0.56, x_hi = 0.56, y_lo = 0.22, y_hi = 0.72;
  // Desk rulers go in a strip along the front edge; everything else behind it.
  double ruler_y_hi = 0.34, rest_y_lo = 0.36;
  Point2 holder_center{-0.35, 0.87};
  double holder_length = 0.24, holder_width = 0.098;  // calibrated, see README
  Pose2 stack_zone{{0.05, 0.87}, 0.0};
  Pose2 paper_zone{{0.40, 0.87}, 0.0};
  double clearance = 0.020;
  double adjacent_gap_lo = 0.002, adjacent_gap_hi = 0.005;
  double adjacent_margin = 0.040;
};

inline Scene empty_desk(const DeskLayout& d = {}) {
  Scene s;
  s.table = make_table(transform(rect_footprint(d.width, d.depth), Pose2(d.center, 0.0)), 0.0);
  s.pen_holder_region = transform(rect_footprint(d.holder_length, d.holder_width), Pose2(d.holder_center, 0.0));
  s.stack_zone = d.stack_zone;
  s.paper_zone = d.paper_zone;
  ObjectState holder;
  holder.id = "holder";
  holder.category = Category::pen_holder;
  holder.footprint = rect_footprint(d.holder_length, d.holder_width);
  holder.pose = Pose2(d.holder_center, 0.0);
  holder.height = 0.10;
  holder.mass = 0.3;
  s.objects.push_back(holder);
  return s;
}

// One object of a layout recipe.
struct Item {
  Category category;
  std::string id;
  std::string on;        // supporter id, empty = desk
  std::string adjacent;  // place 2-5 mm from this object
};

struct Combination {
  std::vector<Category> categories;  // ruler stands for any ruler kind
  std::array<std::vector<Item>, 3> layouts;
  std::array<bool, 3> hazard{false, false, false};  // ruler on paper
};

namespace detail {
using C = Category;
inline Item I(C c, std::string id, std::string on = {}, std::string adj = {}) {
  return {c, std::move(id), std::move(on), std::move(adj)};
}
}  // namespace detail

// The twelve combinations and their three layouts each. Category memberships
// and layouts are a reconstruction: 2 to 5 categories per combination, with
// a ruler on paper in C311 and C411.
inline const std::vector<Combination>& combination_table() {
  using detail::I;
  using C = Category;
  const C S = C::straight_ruler, T30 = C::triangle_ruler_30, T45 = C::triangle_ruler_45;
  static const std::vector<Combination> t = {
      // C21 pen, eraser
      {{C::pen, C::eraser},
       {{{I(C::pen, "pen1"), I(C::eraser, "eraser1")},
         {I(C::pen, "pen1"), I(C::eraser, "eraser1", "", "pen1")},
         {I(C::pen, "pen1"), I(C::eraser, "eraser1"), I(C::eraser, "eraser2", "", "eraser1")}}}},
      // C22 eraser, book
      {{C::eraser, C::book},
       {{{I(C::book, "book1"), I(C::eraser, "eraser1", "book1")},
         {I(C::book, "book1"), I(C::book, "book2", "book1"), I(C::eraser, "eraser1")},
         {I(C::book, "book1"), I(C::eraser, "eraser1")}}}},
      // C23 lead case, paper
      {{C::lead_case, C::paper},
       {{{I(C::paper, "paper1"), I(C::lead_case, "lead1", "paper1")},
         {I(C::paper, "paper1"), I(C::lead_case, "lead1")},
         {I(C::paper, "paper1"), I(C::lead_case, "lead1"), I(C::lead_case, "lead2", "", "lead1")}}}},
      // C31 pen, ruler, paper
      {{C::pen, S, C::paper},
       {{{I(C::paper, "paper1"), I(S, "ruler1", "paper1"), I(C::pen, "pen1")},
         {I(C::paper, "paper1"), I(S, "ruler1"), I(C::pen, "pen1", "paper1")},
         {I(C::paper, "paper1"), I(S, "ruler1"), I(C::pen, "pen1")}}},
       {true, false, false}},
      // C32 pen, eraser, paper
      {{C::pen, C::eraser, C::paper},
       {{{I(C::paper, "paper1"), I(C::eraser, "eraser1", "paper1"), I(C::pen, "pen1")},
         {I(C::paper, "paper1"), I(C::pen, "pen1"), I(C::eraser, "eraser1", "", "pen1")},
         {I(C::paper, "paper1"), I(C::pen, "pen1", "paper1"), I(C::eraser, "eraser1")}}}},
      // C33 eraser, lead case, book
      {{C::eraser, C::lead_case, C::book},
       {{{I(C::book, "book1"), I(C::eraser, "eraser1", "book1"), I(C::lead_case, "lead1")},
         {I(C::book, "book1"), I(C::book, "book2"), I(C::lead_case, "lead1", "book2"), I(C::eraser, "eraser1")},
         {I(C::book, "book1"), I(C::eraser, "eraser1"), I(C::lead_case, "lead1", "", "eraser1")}}}},
      // C41 pen, eraser, ruler, paper
      {{C::pen, C::eraser, S, C::paper},
       {{{I(C::paper, "paper1"), I(S, "ruler1", "paper1"), I(C::pen, "pen1"), I(C::eraser, "eraser1")},
         {I(C::paper, "paper1"), I(S, "ruler1"), I(C::eraser, "eraser1", "paper1"), I(C::pen, "pen1")},
         {I(C::paper, "paper1"), I(S, "ruler1"), I(C::pen, "pen1"), I(C::eraser, "eraser1", "", "pen1")}}},
       {true, false, false}},
      // C42 lead case, ruler, paper, book
      {{C::lead_case, S, C::paper, C::book},
       {{{I(C::book, "book1"), I(S, "ruler1", "book1"), I(C::paper, "paper1"), I(C::lead_case, "lead1")},
         {I(C::book, "book1"), I(S, "ruler1"), I(C::paper, "paper1"), I(C::lead_case, "lead1")},
         {I(C::book, "book1"), I(T45, "ruler1", "book1"), I(C::paper, "paper1"), I(C::lead_case, "lead1")}}}},
      // C43 pen, eraser, paper, book
      {{C::pen, C::eraser, C::paper, C::book},
       {{{I(C::book, "book1"), I(C::pen, "pen1", "book1"), I(C::paper, "paper1"), I(C::eraser, "eraser1")},
         {I(C::book, "book1"), I(C::book, "book2", "book1"), I(C::paper, "paper1"),
          I(C::eraser, "eraser1", "paper1"), I(C::pen, "pen1")},
         {I(C::book, "book1"), I(C::paper, "paper1"), I(C::pen, "pen1"), I(C::eraser, "eraser1", "", "pen1")}}}},
      // C51 pen, eraser, lead case, ruler, book
      {{C::pen, C::eraser, C::lead_case, S, C::book},
       {{{I(C::book, "book1"), I(T30, "ruler1", "book1"), I(C::pen, "pen1"), I(C::eraser, "eraser1"),
          I(C::lead_case, "lead1")},
         {I(C::book, "book1"), I(T45, "ruler1"), I(C::pen, "pen1"), I(C::eraser, "eraser1"),
          I(C::lead_case, "lead1")},
         {I(C::book, "book1"), I(S, "ruler1", "book1"), I(C::pen, "pen1"), I(C::eraser, "eraser1"),
          I(C::lead_case, "lead1")}}}},
      // C52 pen, eraser, ruler, paper, book
      {{C::pen, C::eraser, S, C::paper, C::book},
       {{{I(C::book, "book1"), I(C::paper, "paper1"), I(T30, "ruler1"), I(C::eraser, "eraser1", "paper1"),
          I(C::pen, "pen1")},
         {I(C::book, "book1"), I(C::paper, "paper1"), I(T45, "ruler1", "book1"), I(C::pen, "pen1"),
          I(C::eraser, "eraser1")},
         {I(C::book, "book1"), I(C::book, "book2"), I(C::paper, "paper1"), I(T30, "ruler1", "book1"),
          I(C::pen, "pen1"), I(C::eraser, "eraser1")}}}},
      // C53 pen, lead case, ruler, paper, book
      {{C::pen, C::lead_case, S, C::paper, C::book},
       {{{I(C::book, "book1"), I(C::paper, "paper1"), I(S, "ruler1"), I(C::pen, "pen1"), I(C::lead_case, "lead1")},
         {I(C::book, "book1"), I(C::paper, "paper1"), I(T45, "ruler1", "book1"), I(C::pen, "pen1"),
          I(C::lead_case, "lead1")},
         {I(C::book, "book1"), I(C::paper, "paper1"), I(T30, "ruler1"), I(C::pen, "pen1"),
          I(C::lead_case, "lead1", "paper1")}}}},
  };
  return t;
}

inline const Combination& combination(const CxyzSpec& spec) {
  const auto& t = combination_table();
  // Combinations per category count: 3 each for x = 2..5.
  const std::size_t idx = static_cast<std::size_t>((spec.x - 2) * 3 + (spec.y - 1));
  if (spec.x < 2 || spec.x > 5 || spec.y < 1 || spec.y > 3 || spec.z < 1 || spec.z > 3 || idx >= t.size())
    throw Error(ErrorCode::unknown_spec, "no scenario " + spec.label());
  return t[idx];
}

inline std::vector<CxyzSpec> all_specs() {
  std::vector<CxyzSpec> out;
  for (int x = 2; x <= 5; ++x)
    for (int y = 1; y <= 3; ++y)
      for (int z = 1; z <= 3; ++z) out.push_back({x, y, z});
  return out;
}

inline bool is_hazard(const CxyzSpec& spec) {
  return combination(spec).hazard[static_cast<std::size_t>(spec.z - 1)];
}

namespace detail {

inline bool inside_box(const Polygon& p, double x_lo, double x_hi, double y_lo, double y_hi) {
  for (const auto& v : p.vertices())
    if (v.x < x_lo || v.x > x_hi || v.y < y_lo || v.y > y_hi) return false;
  return true;
}

inline bool inside_polygon(const Polygon& inner, const Polygon& outer, double margin) {
  for (const auto& v : inner.vertices()) {
    if (!point_in_polygon(v, outer)) return false;
    if (nearest_edge(outer, v).distance < margin) return false;
  }
  return true;
}

// Pose that puts the body min-rect center at `c` with its long axis at `axis`.
inline Pose2 pose_for(const ObjectState& o, Point2 c, double axis) {
  const OrientedRect r = min_area_rect(o.footprint);
  const double yaw = axis - r.angle;
  return Pose2(c - rotate(r.center, yaw), yaw);
}

// Members of an adjacent pair keep a wider berth from everything else so that
// separating them cannot push one into a third object.
inline bool in_adjacent_pair(const std::vector<Item>& items, const std::string& id) {
  for (const auto& it : items)
    if (!it.adjacent.empty() && (it.id == id || it.adjacent == id)) return true;
  return false;
}

inline std::optional<Scene> try_layout(const std::vector<Item>& items, const DeskLayout& d, Rng& rng) {
  Scene s = empty_desk(d);
  for (const auto& item : items) {
    ObjectState o = sample_object(item.category, item.id, rng);
    const ObjectState* sup = item.on.empty() ? nullptr : s.find(item.on);
    if (!item.on.empty() && !sup) throw Error(ErrorCode::unknown_spec, "layout refers to missing '" + item.on + "'");
    const ObjectState* partner = item.adjacent.empty() ? nullptr : s.find(item.adjacent);
    if (sup) o.supported_by = sup->id;
    // Objects on a support are resampled until they fit on it.
    bool placed = false;
    for (int attempt = 0; attempt < 4000 && !placed; ++attempt) {
      if (sup && attempt % 200 == 199)
        o = sample_object(item.category, item.id, rng), o.supported_by = sup->id;
      if (sup) {
        const OrientedRect sr = min_area_rect(sup->world_footprint());
        const double off = o.category == Category::book ? 0.01 : 0.03;
        const double jitter = is_ruler(o.category) ? deg2rad(5.0) : (o.category == Category::book ? 0.0 : kPi);
        const Point2 c = sr.center + sr.major_axis() * rng.uniform(-off, off) + sr.minor_axis() * rng.uniform(-off, off);
        o.pose = pose_for(o, c, sr.angle + rng.uniform(-jitter, jitter));
      } else if (partner) {
        const OrientedRect pr = min_area_rect(partner->world_footprint());
        const OrientedRect br = min_area_rect(o.footprint);
        const double gap = rng.uniform(d.adjacent_gap_lo, d.adjacent_gap_hi);
        const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
        const Point2 c = pr.center + pr.minor_axis() * (side * (pr.half_b + br.half_b + gap)) +
                         pr.major_axis() * rng.uniform(-0.01, 0.01);
        o.pose = pose_for(o, c, pr.angle);
      } else if (is_ruler(o.category)) {
        const Point2 c{rng.uniform(-0.35, 0.35), rng.uniform(0.25, 0.31)};
        o.pose = pose_for(o, c, rng.uniform(-deg2rad(15.0), deg2rad(15.0)));
      } else {
        const Point2 c{rng.uniform(d.x_lo, d.x_hi), rng.uniform(d.rest_y_lo, d.y_hi)};
        o.pose = pose_for(o, c, rng.uniform(-kPi, kPi));
      }
      const Polygon w = o.world_footprint();
      if (sup) {
        // Rulers keep a wider margin: a push drifts them sideways by up to
        // sin(tilt) times the push length.
        if (!inside_polygon(w, sup->world_footprint(), is_ruler(o.category) ? 0.015 : 0.005)) continue;
      } else if (is_ruler(o.category)) {
        if (!inside_box(w, d.x_lo, d.x_hi, d.y_lo, d.ruler_y_hi)) continue;
      } else if (!inside_box(w, d.x_lo, d.x_hi, d.rest_y_lo, d.y_hi)) {
        continue;
      }
      bool ok = true;
      for (const auto& other : s.objects) {
        // Clearance is only required within a layer.
        if (is_fixture(other.category) || other.supported_by != o.supported_by) continue;
        const double gap = polygon_distance(w, other.world_footprint());
        if (partner && other.id == partner->id) {
          if (gap < d.adjacent_gap_lo - 1e-9 || gap > d.adjacent_gap_hi + 0.002) ok = false;
        } else if (gap < (in_adjacent_pair(items, item.id) || in_adjacent_pair(items, other.id)
                              ? d.adjacent_margin
                              : d.clearance)) {
          ok = false;
        }
        if (!ok) break;
      }
      placed = ok;
    }
    if (!placed) return std::nullopt;
    s.objects.push_back(std::move(o));
  }
  return s;
}

}  // namespace detail

inline Scene generate_scenario(const CxyzSpec& spec, std::uint64_t seed, const DeskLayout& d = {}) {
  const Combination& comb = combination(spec);
  const auto& items = comb.layouts[static_cast<std::size_t>(spec.z - 1)];
  Rng rng(derive_seed(seed, hash_string(spec.label()), 0));
  for (int attempt = 0; attempt < 200; ++attempt) {
    if (auto s = detail::try_layout(items, d, rng)) {
      s->label = spec.label();
      s->rng_seed = seed;
      if (auto bad = check_scene_invariants(*s))
        throw Error(ErrorCode::degenerate_input, spec.label() + ": " + *bad);
      return std::move(*s);
    }
  }
  throw Error(ErrorCode::degenerate_input, "could not lay out " + spec.label());
}

inline Scene generate_scenario(std::string_view label, std::uint64_t seed) {
  return generate_scenario(parse_spec(label), seed);
}

}  // namespace deskorg
