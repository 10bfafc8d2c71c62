// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "deskorg/perception.hpp"
#include "deskorg/suite.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace deskorg;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Verdict& v) {
  std::printf("[%s] %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str());
  std::fflush(stdout);
  failures += !v.pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. Hull vs all-pairs oracle, min-rect vs 0.05 degree sweep.
Verdict geometry() {
  const auto t0 = Clock::now();
  int hull_ok = 0, rect_ok = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Rng rng(derive_seed(1001, static_cast<std::uint64_t>(i), 0));
    const auto pts = oracle::random_points(rng, 5 + rng.index(60));
    hull_ok += convex_hull(pts).vertices() == oracle::hull_all_pairs(pts);

    const Polygon poly = oracle::random_convex_polygon(rng);
    const double area = min_area_rect(poly).area();
    const double sweep = oracle::min_rect_area_sweep(poly.vertices(), 0.05);
    const double exact = oracle::min_rect_area_edges(poly.vertices());
    worst = std::max(worst, std::abs(area - exact) / exact);
    rect_ok += area <= sweep * (1.0 + 1e-9) && std::abs(area - exact) <= 1e-9 * exact;
  }
  const double dt = seconds_since(t0);
  return {hull_ok == 100 && rect_ok == 100 && dt < 2.0,
          fmt("hull %d/100 exact, min-rect %d/100 (<= sweep, worst rel. err vs edge oracle %.1e), %.3f s",
              hull_ok, rect_ok, worst, dt)};
}

// Independent reason a plan could not be produced. For a convex support the
// push path p_p -> p_g stays inside iff p_p does, so an unreachable edge means
// the far edge center is outside.
bool refusal_justified(const Scene& s, ErrorCode code) {
  const ObjectState& r = s.at("ruler");
  const OrientedRect rect = min_area_rect(r.world_footprint());
  std::vector<Polygon> supports{s.table.support_polygon};
  for (const auto& o : s.objects)
    if (is_deformable(o.category)) supports.push_back(o.world_footprint());
  if (code == ErrorCode::no_support) {
    for (const auto& S : supports)
      if (point_in_polygon(rect.center, S)) return false;
    return true;
  }
  if (code != ErrorCode::edge_unreachable) return false;
  const auto sup = push_support(r, s);
  const Polygon S = sup ? s.at(*sup).world_footprint() : s.table.support_polygon;
  Segment e = S.edge(0);
  for (std::size_t i = 1; i < S.size(); ++i)
    if (point_segment_distance(rect.center, S.edge(i).p0, S.edge(i).p1) <
        point_segment_distance(rect.center, e.p0, e.p1))
      e = S.edge(i);
  const Point2 foot = foot_of_perpendicular(rect.center, e);
  double best = -1.0;
  Point2 far{};
  for (const Point2 c : rect.edge_centers())
    if (distance(c, foot) > best) {
      best = distance(c, foot);
      far = c;
    }
  return !point_in_polygon(far, S) || point_segment_distance(far, e.p0, e.p1) < 1e-9;
}

// 2. Push-grasp geometry on random scenes.
std::string push_plans(Verdict* v) {
  std::ostringstream log;
  log.precision(17);
  int planned = 0, good = 0, refused = 0, justified = 0;
  std::string first_bad;
  for (int i = 0; i < 1000; ++i) {
    Rng rng(derive_seed(2002, static_cast<std::uint64_t>(i), 0));
    const Scene s = fixture::random_push_scene(rng);
    try {
      const PushGraspPlan p = plan_push_grasp(s.at("ruler"), s, PrimitiveConfig{});
      ++planned;
      const auto bad = fixture::check_push_plan(p, s);
      good += !bad;
      if (bad && first_bad.empty()) first_bad = fmt("scene %d: %s", i, bad->c_str());
      log << i << ',' << p.p_g_2d.x << ',' << p.p_g_2d.y << ',' << p.p_p_2d.x << ',' << p.p_p_2d.y << ','
          << p.direction_d.x << ',' << p.direction_d.y << ',' << p.push_start.yaw << '\n';
    } catch (const Error& e) {
      ++refused;
      justified += refusal_justified(s, e.code());
      log << i << ",refused," << static_cast<int>(e.code()) << '\n';
    }
  }
  if (v) {
    v->pass = planned > 0 && good == planned && justified == refused;
    v->detail = fmt("%d/%d plans satisfy every property; %d scenes refused (%d independently justified)",
                    good, planned, refused, justified);
    if (!first_bad.empty()) v->detail += "; first violation " + first_bad;
  }
  return log.str();
}

Scene perception_scene(int i, Rng& rng) {
  Scene s;
  if (i % 2 == 0) {
    s = generate_scenario(all_specs()[static_cast<std::size_t>(i / 2) % 36], 0);
  } else {
    const Polygon top = transform(rect_footprint(rng.uniform(1.0, 1.4), rng.uniform(0.6, 0.8)),
                                  Pose2({rng.uniform(-0.1, 0.1), rng.uniform(0.5, 0.7)}, deg2rad(rng.uniform(-15, 15))));
    s.table = make_table(top, 0.0);
  }
  return s;
}

// 3. Table extraction from synthetic clouds: sigma 2 mm, 20% outliers.
Verdict perception() {
  int normal_ok = 0, recall_ok = 0, iou_ok = 0, edge_ok = 0;
  double worst_normal = 0.0, worst_recall = 1.0, worst_iou = 1.0, worst_edge = 0.0;
  for (int i = 0; i < 50; ++i) {
    Rng rng(derive_seed(3003, static_cast<std::uint64_t>(i), 0));
    const Scene s = perception_scene(i, rng);
    const LabeledCloud lc = synth_cloud_labeled(s, 0.74, 0.002, 0.2, derive_seed(3003, static_cast<std::uint64_t>(i), 1));

    const PlaneFit f = ransac_plane(lc.cloud, PerceptionConfig{});
    const double tilt = std::acos(std::min(1.0, std::abs(f.plane.normal.z)));
    std::vector<char> in(lc.cloud.size(), 0);
    for (std::size_t k : f.inliers) in[k] = 1;
    std::size_t table = 0, hit = 0;
    for (std::size_t k = 0; k < lc.labels.size(); ++k)
      if (lc.labels[k] == PointLabel::table) {
        ++table;
        hit += in[k];
      }
    const double recall = table ? double(hit) / double(table) : 0.0;

    const TableExtraction ex = extract_table_detailed(lc.cloud, PerceptionConfig{});
    const double overlap = iou(ex.table.support_polygon, s.table.support_polygon);
    const double edge = angle_diff_mod(ex.table.dominant_edge.angle(), s.table.dominant_edge.angle(), kPi);

    normal_ok += tilt < deg2rad(1.0);
    recall_ok += recall >= 0.95;
    iou_ok += overlap >= 0.95;
    edge_ok += edge < deg2rad(1.0);
    worst_normal = std::max(worst_normal, tilt);
    worst_recall = std::min(worst_recall, recall);
    worst_iou = std::min(worst_iou, overlap);
    worst_edge = std::max(worst_edge, edge);
  }
  return {normal_ok == 50 && recall_ok == 50 && iou_ok == 50 && edge_ok == 50,
          fmt("normal %d/50 (worst %.3f deg), inlier recall %d/50 (worst %.4f), IoU %d/50 (worst %.4f), "
              "dominant edge %d/50 (worst %.3f deg)",
              normal_ok, rad2deg(worst_normal), recall_ok, worst_recall, iou_ok, worst_iou, edge_ok,
              rad2deg(worst_edge))};
}

// 4. Exact table anchors.
Verdict anchors() {
  const FeasibilityTables t = FeasibilityTables::calibrated();
  struct A {
    const char* name;
    double got, want;
  };
  const A a[] = {
      {"noncontact 9 mm", contact_grasp_probability(t, GraspMode::noncontact, 0.009).probability, 0.6},
      {"contact lateral 1/3", contact_grasp_probability(t, GraspMode::contact, 0.01, 1.0 / 3.0, 0.0).probability, 0.9},
      {"contact longitudinal 1/3", contact_grasp_probability(t, GraspMode::contact, 0.01, 0.0, 1.0 / 3.0).probability, 0.9},
      {"critical gsm at 90 mm", critical_gsm(t, 0.09).gsm, 120.0},
      {"pry 12 mm 9 deg", pry_probability(t, 0.012, deg2rad(9.0)).probability, 1.0},
      {"pry 9 mm 0 deg", pry_probability(t, 0.009, 0.0).probability, 0.8},
  };
  int ok = 0, n = 0;
  std::string bad;
  for (const auto& x : a) {
    ++n;
    if (x.got == x.want) ++ok;
    else bad += fmt(" %s=%g", x.name, x.got);
  }
  for (double deg = 0.0; deg <= 15.0; deg += 1.0) {
    ++n;
    const double p = pry_probability(t, 0.024, deg2rad(deg)).probability;
    if (p == 0.0) ++ok;
    else bad += fmt(" pry 24 mm %g deg=%g", deg, p);
  }
  return {ok == n, fmt("%d/%d anchors exact%s", ok, n, bad.empty() ? "" : (";" + bad).c_str())};
}

// 5. Deterministic suite on the golden scenes.
std::string deterministic_suite(const std::vector<Scene>& catalog, Verdict* v) {
  const auto t0 = Clock::now();
  const SuiteResult res = run_suite(catalog, {5, 0, ExecMode::deterministic, true}, SimConfig{});
  const double dt = seconds_since(t0);
  if (v) {
    int clean = 0, clean_ok = 0, hazard_ok = 0;
    for (const auto& s : res.scenarios) {
      if (is_hazard(parse_spec(s.scenario))) continue;
      ++clean;
      clean_ok += s.successes == 5;
    }
    for (const auto& r : res.rows)
      if (is_hazard(parse_spec(r.scenario)) && r.outcome == Outcome::failure && r.cause == FailureCause::cograsp)
        ++hazard_ok;
    v->pass = clean == 34 && clean_ok == 34 && hazard_ok == 10 && dt < 10.0;
    v->detail = fmt("%d/34 hazard-free scenes 5/5, %d/10 C311/C411 episodes fail with cograsp, %.2f s", clean_ok,
                    hazard_ok, dt);
  }
  return episodes_csv(res) + scenarios_csv(res);
}

// 6. Stochastic suite, 1000 trials per scenario.
std::string stochastic_suite(const std::vector<Scene>& catalog, Verdict* v) {
  SimConfig cfg;
  cfg.noise_scale = 1.0;
  const SuiteResult res = run_suite(catalog, {1000, 6006, ExecMode::stochastic, true}, cfg);
  const auto g = group_stats(res);
  if (v) {
    auto rate = [&](const char* name) {
      for (const auto& x : g)
        if (x.group == name) return x;
      return GroupStat{};
    };
    const double x2 = rate("x2").rate(), x3 = rate("x3").rate(), x4 = rate("x4").rate(), x5 = rate("x5").rate();
    const bool a = x2 >= x3 && x3 >= x4 && x4 >= x5;
    const GroupStat ru = rate("ruler");
    const double nr = rate("no_ruler").rate(), r = ru.rate();
    const double half = 1.96 * std::sqrt(r * (1 - r) / ru.episodes);
    const bool b = nr == 1.0 && r >= 0.70 && r <= 0.85;
    const double st = rate("straight").rate(), tr = rate("triangular").rate();
    const bool c = st - tr >= 0.05;
    v->pass = a && b && c;
    v->detail = fmt("(a) x2..x5 = %.3f %.3f %.3f %.3f %s; (b) no_ruler %.3f, ruler %.3f +/- %.3f %s; "
                    "(c) straight %.3f - triangular %.3f = %.3f %s",
                    x2, x3, x4, x5, a ? "ok" : "BAD", nr, r, half, b ? "ok" : "BAD", st, tr, st - tr,
                    c ? "ok" : "BAD");
  }
  return episodes_csv(res) + scenarios_csv(res) + groups_csv(g);
}

}  // namespace

int main() {
  const auto catalog = generate_catalog();

  report(1, "geometry oracles", geometry());

  Verdict v2;
  const std::string push_a = push_plans(&v2);
  report(2, "push-grasp plans", v2);

  report(3, "table extraction", perception());
  report(4, "feasibility anchors", anchors());

  Verdict v5;
  const std::string det_a = deterministic_suite(catalog, &v5);
  report(5, "deterministic golden suite", v5);

  Verdict v6;
  const auto t6 = Clock::now();
  const std::string sto_a = stochastic_suite(catalog, &v6);
  v6.detail += fmt(", %.1f s", seconds_since(t6));
  report(6, "stochastic success rates", v6);

  const bool same_push = push_plans(nullptr) == push_a;
  const bool same_det = deterministic_suite(catalog, nullptr) == det_a;
  const bool same_sto = stochastic_suite(catalog, nullptr) == sto_a;
  report(7, "reproducibility",
         {same_push && same_det && same_sto,
          fmt("rerun byte-identical: push plans %s (%zu B), deterministic suite %s (%zu B), stochastic suite %s (%zu B)",
              same_push ? "yes" : "no", push_a.size(), same_det ? "yes" : "no", det_a.size(),
              same_sto ? "yes" : "no", sto_a.size())});

  std::printf("%d of 7 criteria failed\n", failures);
  return failures;
}
