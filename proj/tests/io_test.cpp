#include "deskorg/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <regex>
#include <set>

#include "deskorg/suite.hpp"
#include "fixtures.hpp"

namespace deskorg {
namespace {

ErrorCode parse_error(const std::string& text, std::string* msg = nullptr) {
  try {
    parse_scene(text);
  } catch (const Error& e) {
    if (msg) *msg = e.what();
    return e.code();
  }
  return ErrorCode::io;
}

TEST(SceneJson, GoldenRoundTripIsExact) {
  for (const auto& spec : all_specs()) {
    const Scene s = generate_scenario(spec, 0);
    const std::string text = dump_scene(s);
    const Scene back = parse_scene(text);
    EXPECT_EQ(back, s) << spec.label();
    EXPECT_EQ(dump_scene(back), text) << spec.label();
  }
}

TEST(SceneJson, MidEpisodeStateRoundTrips) {
  const Scene s = generate_scenario("C533", 0);
  std::vector<Scene> states;
  run_episode(s, ExecMode::deterministic, 0, SimConfig{}, nullptr,
              [&](std::size_t, const Scene& cur) { states.push_back(cur); });
  ASSERT_FALSE(states.empty());
  bool saw_hand = false;
  for (const auto& st : states) {
    saw_hand |= st.in_hand.has_value();
    EXPECT_EQ(parse_scene(dump_scene(st)), st);
  }
  EXPECT_TRUE(saw_hand);
}

TEST(SceneJson, MalformedInputIsASchemaError) {
  const std::string good = dump_scene(generate_scenario("C211", 0));
  std::string msg;
  EXPECT_EQ(parse_error("{\"objects\": [", &msg), ErrorCode::schema);
  EXPECT_NE(msg.find("malformed JSON"), std::string::npos);
  EXPECT_EQ(parse_error("[]"), ErrorCode::schema);

  auto mutate = [&](auto&& f) {
    json j = json::parse(good);
    f(j);
    return j.dump();
  };
  EXPECT_EQ(parse_error(mutate([](json& j) { j.erase("objects"); }), &msg), ErrorCode::schema);
  EXPECT_NE(msg.find("objects"), std::string::npos);
  EXPECT_EQ(parse_error(mutate([](json& j) { j["objects"][1]["category"] = "stapler"; }), &msg), ErrorCode::schema);
  EXPECT_NE(msg.find("$.objects[1].category"), std::string::npos);
  EXPECT_EQ(parse_error(mutate([](json& j) { j["objects"][1]["height"] = -1.0; }), &msg), ErrorCode::schema);
  EXPECT_NE(msg.find("$.objects[1].height"), std::string::npos);
  EXPECT_EQ(parse_error(mutate([](json& j) { j["objects"][1]["pose"]["x"] = "far"; })), ErrorCode::schema);
  EXPECT_EQ(parse_error(mutate([](json& j) { j["objects"][1]["location"] = "lost"; })), ErrorCode::schema);
  EXPECT_EQ(parse_error(mutate([](json& j) { j["objects"][1]["supported_by"] = "ghost"; })), ErrorCode::schema);
  EXPECT_EQ(parse_error(mutate([](json& j) { j["objects"][1]["footprint"] = json::array({{0, 0}, {1, 1}}); })),
            ErrorCode::schema);
  EXPECT_EQ(parse_error(mutate([](json& j) { j["table"]["plane"]["normal"] = {1, 0, 0}; })), ErrorCode::schema);
}

TEST(SceneJson, MissingFileIsAnIoError) {
  try {
    load_scene("/nonexistent/dir/scene.json");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io);
  }
}

TEST(Catalog, ShippedFilesMatchTheGenerator) {
  const std::filesystem::path dir = std::filesystem::path(DESKORG_DATA_DIR) / "scenarios";
  const auto generated = generate_catalog();
  ASSERT_EQ(generated.size(), 36u);
  for (const auto& s : generated) {
    const auto path = dir / (s.label + ".json");
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    EXPECT_EQ(read_text(path.string()), dump_scene(s)) << s.label;
  }
  EXPECT_EQ(load_catalog(dir), generated);
}

// Minimal structural XML check: balanced tags, quoted attributes, single root.
std::optional<std::string> xml_problem(const std::string& x) {
  std::vector<std::string> stack;
  std::size_t i = 0, roots = 0;
  const std::regex attr_re(R"(^\s*([A-Za-z_:][-A-Za-z0-9_:.]*)\s*=\s*"[^"<]*")");
  while ((i = x.find('<', i)) != std::string::npos) {
    const std::size_t j = x.find('>', i);
    if (j == std::string::npos) return "unterminated tag";
    std::string tag = x.substr(i + 1, j - i - 1);
    i = j + 1;
    if (tag.starts_with("?")) continue;
    if (tag.starts_with("/")) {
      if (stack.empty() || stack.back() != tag.substr(1)) return "mismatched </" + tag.substr(1) + ">";
      stack.pop_back();
      continue;
    }
    const bool self_closing = tag.ends_with("/");
    if (self_closing) tag.pop_back();
    const std::size_t sp = tag.find_first_of(" \n\t");
    const std::string name = tag.substr(0, sp);
    if (name.empty()) return "empty tag name";
    std::string rest = sp == std::string::npos ? "" : tag.substr(sp);
    std::smatch m;
    std::set<std::string> seen;
    while (rest.find_first_not_of(" \n\t") != std::string::npos) {
      if (!std::regex_search(rest, m, attr_re)) return "bad attribute in <" + name + ">";
      if (!seen.insert(m[1].str()).second) return "duplicate attribute " + m[1].str();
      rest = m.suffix();
    }
    if (stack.empty()) ++roots;
    if (!self_closing) stack.push_back(name);
  }
  if (!stack.empty()) return "unclosed <" + stack.back() + ">";
  if (roots != 1) return "expected one root element";
  return std::nullopt;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

TEST(Svg, WellFormedForEveryGoldenScene) {
  for (const auto& s : generate_catalog()) {
    const std::string svg = render_svg(s);
    const auto bad = xml_problem(svg);
    EXPECT_FALSE(bad) << s.label << ": " << *bad;
    EXPECT_EQ(count(svg, "class=\"obj "), s.objects.size()) << s.label;
  }
  EXPECT_TRUE(xml_problem("<svg><g></svg>"));
  EXPECT_TRUE(xml_problem("<svg a=1/>"));
}

TEST(Svg, EmptySceneDrawsOnlyTheTable) {
  Scene s = empty_desk();
  s.objects.clear();
  const std::string svg = render_svg(s);
  EXPECT_FALSE(xml_problem(svg));
  EXPECT_EQ(count(svg, "class=\"table\""), 1u);
  EXPECT_EQ(count(svg, "class=\"dominant-edge\""), 1u);
  EXPECT_EQ(count(svg, "class=\"obj "), 0u);
}

TEST(Svg, C511DrawsAllFiveCategories) {
  const std::string svg = render_svg(generate_scenario("C511", 0));
  std::set<std::string> cats;
  const std::regex re("class=\"obj cat-([a-z_0-9]+)");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    std::string c = (*it)[1];
    if (c.find("ruler") != std::string::npos) c = "ruler";
    if (c != "pen_holder") cats.insert(c);
  }
  EXPECT_EQ(cats.size(), 5u);
}

TEST(Svg, BeforeAndAfterDiffer) {
  const Scene s = generate_scenario("C323", 0);
  const auto r = run_episode(s, ExecMode::deterministic, 0, SimConfig{});
  ASSERT_EQ(r.outcome, Outcome::success);
  const std::string after = render_svg(r.final_scene);
  EXPECT_NE(render_svg(s), after);
  EXPECT_NE(after.find(" stored\""), std::string::npos);
}

TEST(Report, C411ReportsCograsp) {
  const Scene s = generate_scenario("C411", 0);
  const Plan plan = build_plan(s, SimConfig{});
  const auto r = execute(s, plan, ExecMode::deterministic, 0, SimConfig{});
  const json j = json::parse(dump_report(r, &plan));
  EXPECT_EQ(j["outcome"], "failure");
  EXPECT_EQ(j["cause"], "cograsp");
  EXPECT_EQ(j["failure"]["kind"], "push_grasp");
  EXPECT_EQ(j["plan"].size(), plan.size());
  EXPECT_EQ(j["objects"]["ruler1"], "on_desk");
  EXPECT_EQ(dump_report(r, &plan), dump_report(execute(s, plan, ExecMode::deterministic, 0, SimConfig{}), &plan));
}

TEST(Report, SuccessHasNullFailure) {
  const auto r = run_episode(generate_scenario("C211", 0), ExecMode::deterministic, 0, SimConfig{});
  const json j = report_to_json(r);
  EXPECT_TRUE(j["failure"].is_null());
  EXPECT_EQ(j["cause"], "none");
  EXPECT_FALSE(j.contains("plan"));
}

TEST(SuiteCsv, DeterministicAcrossRuns) {
  const auto catalog = generate_catalog();
  SimConfig cfg;
  cfg.noise_scale = 1.0;
  const SuiteOptions opt{3, 17, ExecMode::stochastic, true};
  const auto a = run_suite(catalog, opt, cfg);
  const auto b = run_suite(catalog, opt, cfg);
  EXPECT_EQ(episodes_csv(a), episodes_csv(b));
  EXPECT_EQ(scenarios_csv(a), scenarios_csv(b));
  EXPECT_EQ(groups_csv(group_stats(a)), groups_csv(group_stats(b)));
  EXPECT_EQ(count(episodes_csv(a), "\n"), 36u * 3u + 1u);
  EXPECT_EQ(episodes_csv(a).substr(0, 37), "scenario,trial,outcome,cause,actions\n");
}

TEST(SuiteCsv, DeterministicModeGroups) {
  const auto res = run_suite(generate_catalog(), {5, 0, ExecMode::deterministic, true}, SimConfig{});
  const auto g = group_stats(res);
  auto get = [&](const std::string& name) {
    for (const auto& x : g)
      if (x.group == name) return x;
    return GroupStat{};
  };
  EXPECT_EQ(get("no_ruler").rate(), 1.0);
  EXPECT_EQ(get("no_ruler").scenarios + get("ruler").scenarios, 36);
  EXPECT_EQ(get("x2").scenarios, 9);
  for (const auto& s : res.scenarios) {
    const bool hazard = is_hazard(parse_spec(s.scenario));
    EXPECT_EQ(s.successes, hazard ? 0 : 5) << s.scenario;
  }
}

}  // namespace
}  // namespace deskorg
