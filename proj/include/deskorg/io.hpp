#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "deskorg/planner.hpp"
#include "deskorg/scene.hpp"
#include "deskorg/table.hpp"

namespace deskorg {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Scene JSON. Meters and radians throughout; see schema/scene.schema.json.

namespace detail {

inline json point_json(Point2 p) { return json::array({p.x, p.y}); }
inline json polygon_json(const Polygon& p) {
  json a = json::array();
  for (const auto& v : p.vertices()) a.push_back(point_json(v));
  return a;
}
inline json segment_json(const Segment& s) { return json::array({point_json(s.p0), point_json(s.p1)}); }
inline json pose_json(const Pose2& p) {
  return {{"x", p.position.x}, {"y", p.position.y}, {"theta", p.theta}};
}

[[noreturn]] inline void schema_fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::schema, path + ": " + msg);
}

inline const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) schema_fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_fail(path, std::string("missing field '") + key + "'");
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_fail(path, "number is not finite");
  return v;
}

inline std::string string_of(const json& j, const std::string& path) {
  if (!j.is_string()) schema_fail(path, "expected a string");
  return j.get<std::string>();
}

inline Point2 point_of(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) schema_fail(path, "expected [x, y]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

inline Polygon polygon_of(const json& j, const std::string& path) {
  if (!j.is_array()) schema_fail(path, "expected an array of points");
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < j.size(); ++i) pts.push_back(point_of(j[i], path + "[" + std::to_string(i) + "]"));
  try {
    return Polygon(std::move(pts));
  } catch (const Error& e) {
    schema_fail(path, e.what());
  }
}

inline Segment segment_of(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) schema_fail(path, "expected [[x, y], [x, y]]");
  return {point_of(j[0], path + "[0]"), point_of(j[1], path + "[1]")};
}

inline Pose2 pose_of(const json& j, const std::string& path) {
  return Pose2({number(field(j, "x", path), path + ".x"), number(field(j, "y", path), path + ".y")},
               number(field(j, "theta", path), path + ".theta"));
}

}  // namespace detail

inline json scene_to_json(const Scene& s) {
  using namespace detail;
  json j;
  j["label"] = s.label;
  j["rng_seed"] = s.rng_seed;
  json t;
  t["plane"] = {{"normal", {s.table.plane.normal.x, s.table.plane.normal.y, s.table.plane.normal.z}},
                {"offset", s.table.plane.offset}};
  t["support_polygon"] = polygon_json(s.table.support_polygon);
  json edges = json::array();
  for (const auto& e : s.table.edges) edges.push_back(segment_json(e));
  t["edges"] = edges;
  t["dominant_edge"] = segment_json(s.table.dominant_edge);
  j["table"] = t;
  j["pen_holder_region"] = polygon_json(s.pen_holder_region);
  j["stack_zone"] = pose_json(s.stack_zone);
  j["paper_zone"] = pose_json(s.paper_zone);
  json objs = json::array();
  for (const auto& o : s.objects) {
    json oj;
    oj["id"] = o.id;
    oj["category"] = category_name(o.category);
    oj["footprint"] = polygon_json(o.footprint);
    oj["pose"] = pose_json(o.pose);
    oj["height"] = o.height;
    oj["mass"] = o.mass;
    if (const auto* p = std::get_if<PaperMaterial>(&o.material))
      oj["material"] = {{"type", "paper"}, {"gsm", p->gsm}};
    else if (const auto* b = std::get_if<BookMaterial>(&o.material))
      oj["material"] = {{"type", "book"}, {"thickness", b->thickness}, {"spine_gap", b->spine_gap}};
    else
      oj["material"] = {{"type", "rigid"}};
    oj["supported_by"] = o.supported_by ? *o.supported_by : std::string(kDesktop);
    oj["location"] = location_name(o.location);
    objs.push_back(oj);
  }
  j["objects"] = objs;
  if (s.in_hand) {
    json h{{"id", s.in_hand->id}, {"yaw_error", s.in_hand->yaw_error}};
    h["target_yaw"] = s.in_hand->target_yaw ? json(*s.in_hand->target_yaw) : json(nullptr);
    j["in_hand"] = h;
  } else {
    j["in_hand"] = nullptr;
  }
  return j;
}

inline Scene scene_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) schema_fail("$", "expected an object");
  Scene s;
  if (j.contains("label")) s.label = string_of(j["label"], "$.label");
  if (j.contains("rng_seed")) {
    if (!j["rng_seed"].is_number_unsigned()) schema_fail("$.rng_seed", "expected a non-negative integer");
    s.rng_seed = j["rng_seed"].get<std::uint64_t>();
  }
  const json& t = field(j, "table", "$");
  PlaneModel plane;
  if (t.contains("plane")) {
    const json& pj = t["plane"];
    const json& n = field(pj, "normal", "$.table.plane");
    if (!n.is_array() || n.size() != 3) schema_fail("$.table.plane.normal", "expected [nx, ny, nz]");
    plane.normal = {number(n[0], "$.table.plane.normal[0]"), number(n[1], "$.table.plane.normal[1]"),
                    number(n[2], "$.table.plane.normal[2]")};
    if (std::abs(norm(plane.normal) - 1.0) > 1e-6 || plane.normal.z <= 0.0)
      schema_fail("$.table.plane.normal", "expected an upward unit vector");
    plane.offset = number(field(pj, "offset", "$.table.plane"), "$.table.plane.offset");
  }
  const Polygon support = polygon_of(field(t, "support_polygon", "$.table"), "$.table.support_polygon");
  s.table = make_table(plane, support, support);
  if (t.contains("edges")) {
    s.table.edges.clear();
    const json& e = t["edges"];
    if (!e.is_array() || e.empty()) schema_fail("$.table.edges", "expected a non-empty array");
    for (std::size_t i = 0; i < e.size(); ++i)
      s.table.edges.push_back(segment_of(e[i], "$.table.edges[" + std::to_string(i) + "]"));
    s.table.dominant_edge = select_dominant_edge(s.table.edges);
  }
  if (t.contains("dominant_edge")) s.table.dominant_edge = segment_of(t["dominant_edge"], "$.table.dominant_edge");

  s.pen_holder_region = polygon_of(field(j, "pen_holder_region", "$"), "$.pen_holder_region");
  s.stack_zone = pose_of(field(j, "stack_zone", "$"), "$.stack_zone");
  s.paper_zone = j.contains("paper_zone") ? pose_of(j["paper_zone"], "$.paper_zone") : s.stack_zone;

  const json& objs = field(j, "objects", "$");
  if (!objs.is_array()) schema_fail("$.objects", "expected an array");
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const std::string path = "$.objects[" + std::to_string(i) + "]";
    const json& oj = objs[i];
    ObjectState o;
    o.id = string_of(field(oj, "id", path), path + ".id");
    if (o.id.empty() || o.id == kDesktop) schema_fail(path + ".id", "invalid object id");
    try {
      o.category = parse_category(string_of(field(oj, "category", path), path + ".category"));
    } catch (const Error& e) {
      schema_fail(path + ".category", e.what());
    }
    o.footprint = polygon_of(field(oj, "footprint", path), path + ".footprint");
    o.pose = pose_of(field(oj, "pose", path), path + ".pose");
    o.height = number(field(oj, "height", path), path + ".height");
    if (!(o.height > 0.0)) schema_fail(path + ".height", "must be positive");
    o.mass = oj.contains("mass") ? number(oj["mass"], path + ".mass") : 0.0;
    if (oj.contains("material")) {
      const json& m = oj["material"];
      const std::string type = string_of(field(m, "type", path + ".material"), path + ".material.type");
      if (type == "rigid") {
        o.material = RigidMaterial{};
      } else if (type == "paper") {
        o.material = PaperMaterial{number(field(m, "gsm", path + ".material"), path + ".material.gsm")};
      } else if (type == "book") {
        BookMaterial b;
        b.thickness = number(field(m, "thickness", path + ".material"), path + ".material.thickness");
        if (m.contains("spine_gap")) b.spine_gap = number(m["spine_gap"], path + ".material.spine_gap");
        o.material = b;
      } else {
        schema_fail(path + ".material.type", "unknown material '" + type + "'");
      }
    }
    if (o.category == Category::book && !o.book()) schema_fail(path + ".material", "books need a book material");
    if (o.category == Category::paper && !std::get_if<PaperMaterial>(&o.material))
      schema_fail(path + ".material", "paper needs a paper material");
    if (oj.contains("supported_by")) {
      const std::string sup = string_of(oj["supported_by"], path + ".supported_by");
      if (sup != kDesktop) o.supported_by = sup;
    }
    if (oj.contains("location")) {
      const std::string loc = string_of(oj["location"], path + ".location");
      if (loc == "desk") o.location = Location::desk;
      else if (loc == "in_hand") o.location = Location::in_hand;
      else if (loc == "stored") o.location = Location::stored;
      else schema_fail(path + ".location", "unknown location '" + loc + "'");
    }
    s.objects.push_back(std::move(o));
  }
  if (j.contains("in_hand") && !j["in_hand"].is_null()) {
    const json& h = j["in_hand"];
    InHand ih;
    ih.id = string_of(field(h, "id", "$.in_hand"), "$.in_hand.id");
    if (h.contains("yaw_error")) ih.yaw_error = number(h["yaw_error"], "$.in_hand.yaw_error");
    if (h.contains("target_yaw") && !h["target_yaw"].is_null())
      ih.target_yaw = number(h["target_yaw"], "$.in_hand.target_yaw");
    s.in_hand = ih;
  }
  if (auto bad = check_scene_invariants(s)) schema_fail("$", *bad);
  return s;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::io, "write to '" + path + "' failed");
}

inline Scene parse_scene(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::schema, std::string("malformed JSON: ") + e.what());
  }
  return scene_from_json(j);
}

inline std::string dump_scene(const Scene& s) { return scene_to_json(s).dump(2) + "\n"; }
inline Scene load_scene(const std::string& path) { return parse_scene(read_text(path)); }
inline void save_scene(const std::string& path, const Scene& s) { write_text(path, dump_scene(s)); }

// ---------------------------------------------------------------------------
// Reports.

inline json plan_to_json(const Plan& plan) {
  json a = json::array();
  for (const auto& act : plan) {
    json j{{"kind", to_string(act.kind)}, {"object", act.object_id}};
    if (const auto* s = std::get_if<SeparationPayload>(&act.payload)) j["neighbor"] = s->neighbor_id;
    if (const auto* p = std::get_if<PlacePayload>(&act.payload)) j["target"] = to_string(p->target);
    a.push_back(j);
  }
  return a;
}

inline json report_to_json(const TaskReport& r, const Plan* plan = nullptr) {
  json j;
  j["scenario"] = r.scenario;
  j["mode"] = to_string(r.mode);
  j["seed"] = r.seed;
  j["outcome"] = to_string(r.outcome);
  j["cause"] = to_string(r.cause());
  j["total_actions"] = r.total_actions;
  j["completed_actions"] = r.completed_actions;
  if (r.failure) {
    j["failure"] = {{"action_index", r.failure->action_index},
                    {"kind", to_string(r.failure->kind)},
                    {"object", r.failure->object_id},
                    {"cause", to_string(r.failure->cause)},
                    {"detail", r.failure->detail}};
  } else {
    j["failure"] = nullptr;
  }
  json objs = json::object();
  for (const auto& [id, st] : r.objects) objs[id] = st;
  j["objects"] = objs;
  if (plan) j["plan"] = plan_to_json(*plan);
  return j;
}

inline std::string dump_report(const TaskReport& r, const Plan* plan = nullptr) {
  return report_to_json(r, plan).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Top-down SVG. Coordinates in millimetres, y up.

namespace detail {
inline std::string mm(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v * 1000.0 + 0.0);
  return buf;
}
inline std::string svg_points(const Polygon& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ' ';
    out += mm(p[i].x) + "," + mm(-p[i].y);
  }
  return out;
}
inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}
inline std::string category_color(Category c) {
  switch (c) {
    case Category::pen: return "#1f77b4";
    case Category::eraser: return "#ff7f0e";
    case Category::lead_case: return "#2ca02c";
    case Category::straight_ruler: return "#d62728";
    case Category::triangle_ruler_30: return "#9467bd";
    case Category::triangle_ruler_45: return "#8c564b";
    case Category::paper: return "#f5f5f0";
    case Category::book: return "#bcbd22";
    case Category::pen_holder: return "#7f7f7f";
  }
  return "#000000";
}
}  // namespace detail

inline std::string render_svg(const Scene& s) {
  using namespace detail;
  const Polygon& top = s.table.support_polygon;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& v : top.vertices()) {
    x0 = std::min(x0, v.x), x1 = std::max(x1, v.x);
    y0 = std::min(y0, v.y), y1 = std::max(y1, v.y);
  }
  const double pad = 0.02;
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << mm(x0 - pad) << ' ' << mm(-(y1 + pad)) << ' '
    << mm(x1 - x0 + 2 * pad) << ' ' << mm(y1 - y0 + 2 * pad) << "\">\n";
  o << "  <title>" << xml_escape(s.label.empty() ? "scene" : s.label) << "</title>\n";
  o << "  <polygon class=\"table\" points=\"" << svg_points(top) << "\" fill=\"#e8dcc8\" stroke=\"#8b7355\" stroke-width=\"2\"/>\n";
  const Segment& d = s.table.dominant_edge;
  o << "  <line class=\"dominant-edge\" x1=\"" << mm(d.p0.x) << "\" y1=\"" << mm(-d.p0.y) << "\" x2=\"" << mm(d.p1.x)
    << "\" y2=\"" << mm(-d.p1.y) << "\" stroke=\"#d00000\" stroke-width=\"5\"/>\n";
  if (!s.pen_holder_region.empty())
    o << "  <polygon class=\"zone pen-holder\" points=\"" << svg_points(s.pen_holder_region)
      << "\" fill=\"none\" stroke=\"#555555\" stroke-dasharray=\"6 4\"/>\n";
  auto cross_mark = [&](const Pose2& p, const char* cls) {
    const double r = 0.015;
    o << "  <path class=\"zone " << cls << "\" d=\"M" << mm(p.position.x - r) << ',' << mm(-p.position.y) << " L"
      << mm(p.position.x + r) << ',' << mm(-p.position.y) << " M" << mm(p.position.x) << ','
      << mm(-(p.position.y - r)) << " L" << mm(p.position.x) << ',' << mm(-(p.position.y + r))
      << "\" stroke=\"#555555\" stroke-width=\"2\"/>\n";
  };
  cross_mark(s.stack_zone, "stack-zone");
  cross_mark(s.paper_zone, "paper-zone");
  // Lower layers first so stacked objects are drawn on top.
  std::vector<const ObjectState*> order;
  for (const auto& ob : s.objects)
    if (ob.location != Location::in_hand) order.push_back(&ob);
  std::stable_sort(order.begin(), order.end(), [&](const ObjectState* a, const ObjectState* b) {
    const bool fa = is_fixture(a->category), fb = is_fixture(b->category);
    if (fa != fb) return fa;
    const bool sa = a->location == Location::stored, sb = b->location == Location::stored;
    if (sa != sb) return !sa;
    return s.base_z(*a) < s.base_z(*b);
  });
  for (const ObjectState* ob : order) {
    o << "  <polygon class=\"obj cat-" << category_name(ob->category)
      << (ob->location == Location::stored ? " stored" : "") << "\" data-id=\"" << xml_escape(ob->id)
      << "\" points=\"" << svg_points(ob->world_footprint()) << "\" fill=\"" << category_color(ob->category)
      << "\" fill-opacity=\"" << (is_fixture(ob->category) ? "0.25" : "0.85")
      << "\" stroke=\"#222222\" stroke-width=\"1\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace deskorg
