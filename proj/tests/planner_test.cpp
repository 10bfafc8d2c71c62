#include "deskorg/planner.hpp"

#include <gtest/gtest.h>

#include "deskorg/scenario.hpp"
#include "fixtures.hpp"

namespace deskorg {
namespace {

using fixture::make;
using fixture::place;

ObjectState eraser(std::string id) { return make(Category::eraser, std::move(id), rect_footprint(0.05, 0.02), 0.012); }
ObjectState book(std::string id, double t = 0.01) { return make(Category::book, std::move(id), rect_footprint(0.2, 0.15), t); }
ObjectState paper(std::string id) { return make(Category::paper, std::move(id), rect_footprint(0.297, 0.21), 0.0001); }
ObjectState ruler(std::string id) { return make(Category::straight_ruler, std::move(id), rect_footprint(0.15, 0.03), 0.002); }

TEST(Assign, CategoriesToPrimitives) {
  Scene s = empty_desk();
  s.objects.push_back(place(make(Category::pen, "pen", rect_footprint(0.14, 0.01), 0.01), {0.3, 0.5}, 0.0));
  s.objects.push_back(place(book("book"), {-0.2, 0.5}, 0.0));
  s.objects.push_back(place(ruler("ruler"), {0.2, 0.28}, 0.0));
  s.objects.push_back(place(paper("paper"), {0.2, 0.6}, 0.0));
  const auto a = assign_primitives(s);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a.at("pen"), (Assignment{ActionKind::contact_grasp, false, PlaceTarget::pen_holder}));
  EXPECT_EQ(a.at("book"), (Assignment{ActionKind::pry_grasp, true, PlaceTarget::stack_zone}));
  EXPECT_EQ(a.at("ruler"), (Assignment{ActionKind::push_grasp, false, PlaceTarget::pen_holder}));
  EXPECT_EQ(a.at("paper"), (Assignment{ActionKind::contact_grasp, true, PlaceTarget::aligned_pose}));
  EXPECT_TRUE(assign_primitives(empty_desk()).empty());
  try {
    assignment_for(Category::pen_holder);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_category);
  }
}

TEST(Order, RulerOnBookGoesBeforeBook) {
  Scene s = empty_desk();
  s.objects.push_back(place(book("book"), {-0.2, 0.5}, 0.0));
  s.objects.push_back(place(ruler("ruler"), {-0.2, 0.47}, 0.0, "book"));
  s.objects.push_back(place(eraser("eraser"), {0.2, 0.5}, 0.0));
  EXPECT_EQ(order_objects(s), (std::vector<std::string>{"eraser", "ruler", "book"}));
}

TEST(Order, DeformablesBeforeDeskRuler) {
  Scene s = empty_desk();
  s.objects.push_back(place(ruler("ruler"), {0.0, 0.28}, 0.0));
  s.objects.push_back(place(paper("paper"), {0.2, 0.55}, 0.0));
  s.objects.push_back(place(make(Category::pen, "pen", rect_footprint(0.14, 0.01), 0.01), {-0.3, 0.5}, 0.0));
  EXPECT_EQ(order_objects(s), (std::vector<std::string>{"pen", "paper", "ruler"}));
}

TEST(Order, StacksUnloadTopDown) {
  Scene s = empty_desk();
  s.objects.push_back(place(book("a"), {-0.2, 0.5}, 0.0));
  s.objects.push_back(place(book("b"), {-0.2, 0.5}, 0.0, "a"));
  s.objects.push_back(place(eraser("z_low"), {0.2, 0.5}, 0.0));
  s.objects.push_back(place(eraser("a_top"), {-0.2, 0.5}, 0.0, "b"));
  s.objects.push_back(place(paper("p"), {0.2, 0.7}, 0.0));
  // Smalls topmost first; paper before books at equal depth; bottom book last.
  EXPECT_EQ(order_objects(s), (std::vector<std::string>{"a_top", "z_low", "b", "p", "a"}));
  Scene one = empty_desk();
  one.objects.push_back(place(book("only"), {0.0, 0.5}, 0.0));
  EXPECT_EQ(order_objects(one), (std::vector<std::string>{"only"}));
}

TEST(BuildPlan, EmptySceneGivesEmptyPlan) { EXPECT_TRUE(build_plan(empty_desk(), SimConfig{}).empty()); }

TEST(BuildPlan, AdjacentErasersGetSeparated) {
  Scene s = empty_desk();
  s.objects.push_back(place(eraser("e1"), {0.0, 0.5}, 0.0));
  s.objects.push_back(place(eraser("e2"), {0.0, 0.523}, 0.0));
  const Plan p = build_plan(s, SimConfig{});
  ASSERT_FALSE(p.empty());
  EXPECT_EQ(p[0].kind, ActionKind::separation_push);
  EXPECT_EQ(p[1].kind, ActionKind::contact_grasp);
  const auto r = execute(s, p, ExecMode::deterministic, 0, SimConfig{});
  EXPECT_EQ(r.outcome, Outcome::success) << (r.failure ? r.failure->detail : "");
}

TEST(BuildPlan, TiltedPaperIsReorientedParallelToTheEdge) {
  Scene s = empty_desk();
  s.objects.push_back(place(paper("p"), {0.0, 0.55}, 0.5));
  const Plan plan = build_plan(s, SimConfig{});
  ASSERT_EQ(plan.size(), 3u);
  EXPECT_EQ(plan[1].kind, ActionKind::reorient);
  const double yaw = std::get<ReorientPayload>(plan[1].payload).target_yaw;
  EXPECT_NEAR(std::abs(angle_diff_mod(yaw, s.table.dominant_edge.angle(), kPi)), 0.0, 1e-12);
  const auto r = execute(s, plan, ExecMode::deterministic, 0, SimConfig{});
  ASSERT_EQ(r.outcome, Outcome::success);
  EXPECT_FALSE(verify_organized(r.final_scene));
  EXPECT_EQ(r.objects.at("p"), "aligned");
}

// Structural rules that every built plan has to respect.
void check_plan_rules(const Scene& s, const Plan& plan) {
  const SupportGraph g = support_graph(s);
  std::optional<std::string> holding;
  bool planar_seen = false;
  bool ruler_on_support = false;
  for (const auto& [id, sup] : g)
    if (sup && is_ruler(s.at(id).category) && is_deformable(s.at(*sup).category)) ruler_on_support = true;
  std::optional<std::size_t> first_ruler_grasp, first_book_pry, last_deformable_place;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& a = plan[i];
    const Category c = s.at(a.object_id).category;
    const bool payload_ok = [&] {
      switch (a.kind) {
        case ActionKind::contact_grasp: return std::holds_alternative<ContactGraspPlan>(a.payload);
        case ActionKind::push_grasp: return std::holds_alternative<PushGraspPlan>(a.payload);
        case ActionKind::pry_grasp: return std::holds_alternative<PryPlan>(a.payload);
        case ActionKind::reorient: return std::holds_alternative<ReorientPayload>(a.payload);
        case ActionKind::separation_push: return std::holds_alternative<SeparationPayload>(a.payload);
        case ActionKind::place: return std::holds_alternative<PlacePayload>(a.payload);
      }
      return false;
    }();
    EXPECT_TRUE(payload_ok) << i;
    if (is_grasp(a.kind)) {
      EXPECT_FALSE(holding) << "grasp at " << i << " while holding " << *holding;
      holding = a.object_id;
    }
    if (a.kind == ActionKind::place) {
      EXPECT_EQ(holding, a.object_id) << i;
      holding.reset();
    }
    if (is_small(c)) EXPECT_FALSE(planar_seen) << "small-object action after a planar one at " << i;
    else planar_seen = true;
    if (a.kind == ActionKind::push_grasp && !first_ruler_grasp) first_ruler_grasp = i;
    if (a.kind == ActionKind::pry_grasp && !first_book_pry) first_book_pry = i;
    if (a.kind == ActionKind::place && is_deformable(c)) last_deformable_place = i;
  }
  EXPECT_FALSE(holding);
  if (!first_ruler_grasp) return;
  if (ruler_on_support) {
    if (first_book_pry) EXPECT_LT(*first_ruler_grasp, *first_book_pry);
    if (last_deformable_place) EXPECT_LT(*first_ruler_grasp, *last_deformable_place);
  } else if (last_deformable_place) {
    EXPECT_LT(*last_deformable_place, *first_ruler_grasp);
  }
}

TEST(BuildPlan, GoldenPlansFollowOrderingRules) {
  for (std::uint64_t seed : {0, 1, 2}) {
    for (const auto& spec : all_specs()) {
      SCOPED_TRACE(spec.label() + " seed " + std::to_string(seed));
      const Scene s = generate_scenario(spec, seed);
      const Plan p = build_plan(s, SimConfig{});
      check_plan_rules(s, p);
      EXPECT_EQ(build_plan(s, SimConfig{}), p);
    }
  }
}

TEST(Execute, HazardFreeGoldenScenesGetOrganized) {
  for (const auto& spec : all_specs()) {
    if (is_hazard(spec)) continue;
    const Scene s = generate_scenario(spec, 0);
    const auto r = run_episode(s, ExecMode::deterministic, 0, SimConfig{});
    EXPECT_EQ(r.outcome, Outcome::success) << spec.label() << ": " << (r.failure ? r.failure->detail : "");
    EXPECT_EQ(r.completed_actions, r.total_actions);
    const auto bad = verify_organized(r.final_scene);
    EXPECT_FALSE(bad) << spec.label() << ": " << *bad;
  }
}

TEST(Execute, RulerOnPaperFailsWithCograspAtTheRulerGrasp) {
  for (const char* label : {"C311", "C411"}) {
    const Scene s = generate_scenario(label, 0);
    const Plan plan = build_plan(s, SimConfig{});
    const auto r = execute(s, plan, ExecMode::deterministic, 0, SimConfig{});
    ASSERT_EQ(r.outcome, Outcome::failure) << label;
    EXPECT_EQ(r.cause(), FailureCause::cograsp) << label;
    EXPECT_EQ(r.failure->kind, ActionKind::push_grasp);
    EXPECT_EQ(plan[r.failure->action_index].object_id, "ruler1");
    EXPECT_EQ(r.completed_actions, r.failure->action_index);
    EXPECT_EQ(r.objects.at("ruler1"), "on_desk");
  }
}

TEST(Execute, C221CompletesEveryAction) {
  const Scene s = generate_scenario("C221", 0);
  const auto r = run_episode(s, ExecMode::deterministic, 0, SimConfig{});
  EXPECT_EQ(r.outcome, Outcome::success);
  EXPECT_EQ(r.completed_actions, r.total_actions);
  EXPECT_GT(r.total_actions, 0u);
  EXPECT_EQ(r.objects.at("eraser1"), "stored");
  EXPECT_EQ(r.objects.at("book1"), "stacked");
}

TEST(Execute, ObserverSeesEveryCompletedAction) {
  const Scene s = generate_scenario("C411", 0);
  std::vector<std::size_t> seen;
  const auto r = run_episode(s, ExecMode::deterministic, 0, SimConfig{}, nullptr,
                             [&](std::size_t i, const Scene&) { seen.push_back(i); });
  ASSERT_EQ(seen.size(), r.completed_actions);
  for (std::size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i], i);
}

TEST(Execute, SameSeedSameReport) {
  SimConfig cfg;
  cfg.noise_scale = 1.0;
  for (const char* label : {"C522", "C533", "C323"}) {
    const Scene s = generate_scenario(label, 0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto a = run_episode(s, ExecMode::stochastic, seed, cfg);
      const auto b = run_episode(s, ExecMode::stochastic, seed, cfg);
      EXPECT_EQ(a.outcome, b.outcome);
      EXPECT_EQ(a.failure, b.failure);
      EXPECT_EQ(a.final_scene, b.final_scene);
    }
  }
}

TEST(Execute, PlanningErrorsBecomeFailures) {
  Scene s = empty_desk();
  s.objects.push_back(place(book("thick", 0.024), {0.0, 0.5}, 0.0));
  const auto r = run_episode(s, ExecMode::deterministic, 0, SimConfig{});
  EXPECT_EQ(r.outcome, Outcome::failure);
  EXPECT_EQ(r.cause(), FailureCause::infeasible);
  EXPECT_EQ(r.final_scene, s);
}

TEST(Verify, DetectsLeftovers) {
  Scene s = empty_desk();
  s.objects.push_back(place(eraser("e"), {0.0, 0.5}, 0.0));
  EXPECT_TRUE(verify_organized(s));
  EXPECT_FALSE(verify_organized(empty_desk()));
}

}  // namespace
}  // namespace deskorg
