#pragma once

#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "deskorg/io.hpp"
#include "deskorg/planner.hpp"
#include "deskorg/scenario.hpp"

namespace deskorg {

// The 36 golden scenes: every Cxyz generated with seed 0.
inline std::vector<Scene> generate_catalog(std::uint64_t seed = 0) {
  std::vector<Scene> out;
  for (const auto& spec : all_specs()) out.push_back(generate_scenario(spec, seed));
  return out;
}

// Loads <dir>/<label>.json for every Cxyz.
inline std::vector<Scene> load_catalog(const std::filesystem::path& dir) {
  std::vector<Scene> out;
  for (const auto& spec : all_specs()) {
    Scene s = load_scene((dir / (spec.label() + ".json")).string());
    if (s.label.empty()) s.label = spec.label();
    out.push_back(std::move(s));
  }
  return out;
}

struct ScenarioTraits {
  int categories = 0;
  bool has_ruler = false;
  bool straight = false;
  bool triangular = false;
  bool ruler_on_paper = false;
};

inline ScenarioTraits traits_of(const Scene& s) {
  ScenarioTraits t;
  if (s.label.size() == 4 && s.label[0] == 'C') t.categories = s.label[1] - '0';
  const SupportGraph g = support_graph(s);
  for (const auto& o : s.objects) {
    if (o.location != Location::desk || !is_ruler(o.category)) continue;
    t.has_ruler = true;
    (is_triangular(o.category) ? t.triangular : t.straight) = true;
    if (const auto& sup = g.at(o.id); sup && s.at(*sup).category == Category::paper) t.ruler_on_paper = true;
  }
  return t;
}

struct EpisodeRow {
  std::string scenario;
  int trial = 0;
  Outcome outcome = Outcome::success;
  FailureCause cause = FailureCause::none;
  std::size_t actions = 0;
};

struct ScenarioStats {
  std::string scenario;
  ScenarioTraits traits;
  int trials = 0;
  int successes = 0;
};

struct SuiteResult {
  std::vector<EpisodeRow> rows;
  std::vector<ScenarioStats> scenarios;
};

struct SuiteOptions {
  int trials = 5;
  std::uint64_t seed = 0;
  ExecMode mode = ExecMode::deterministic;
  bool keep_rows = true;
};

// Episode seed = derive_seed(seed, scenario index, trial). Plans are built once
// per scenario; execute() replans payloads against the live scene anyway.
inline SuiteResult run_suite(const std::vector<Scene>& catalog, const SuiteOptions& opt, const SimConfig& cfg) {
  if (opt.trials < 1) throw Error(ErrorCode::degenerate_input, "trials must be at least 1");
  SuiteResult res;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const Scene& scene = catalog[i];
    ScenarioStats st{scene.label, traits_of(scene), opt.trials, 0};
    std::optional<Plan> plan;
    try {
      plan = build_plan(scene, cfg);
    } catch (const Error&) {
      // run_episode reports the planning failure for each trial.
    }
    for (int t = 0; t < opt.trials; ++t) {
      const std::uint64_t s = derive_seed(opt.seed, i, static_cast<std::uint64_t>(t));
      const TaskReport r = run_episode(scene, opt.mode, s, cfg, plan ? &*plan : nullptr);
      st.successes += r.outcome == Outcome::success;
      if (opt.keep_rows) res.rows.push_back({scene.label, t, r.outcome, r.cause(), r.completed_actions});
    }
    res.scenarios.push_back(st);
  }
  return res;
}

struct GroupStat {
  std::string group;
  int scenarios = 0;
  int episodes = 0;
  int successes = 0;
  double rate() const { return episodes ? static_cast<double>(successes) / episodes : 0.0; }
};

// Groupings: category count x2..x5, with/without rulers, and straight vs
// triangular rulers. The ruler-on-paper scenes fail for a reason unrelated to
// ruler shape, so they count towards "ruler" but not towards the shape groups.
inline std::vector<GroupStat> group_stats(const SuiteResult& r) {
  std::vector<GroupStat> g{{"x2"}, {"x3"}, {"x4"}, {"x5"}, {"no_ruler"}, {"ruler"}, {"straight"}, {"triangular"}};
  auto add = [](GroupStat& gs, const ScenarioStats& s) {
    ++gs.scenarios;
    gs.episodes += s.trials;
    gs.successes += s.successes;
  };
  for (const auto& s : r.scenarios) {
    const int x = s.traits.categories;
    if (x >= 2 && x <= 5) add(g[static_cast<std::size_t>(x - 2)], s);
    add(s.traits.has_ruler ? g[5] : g[4], s);
    if (!s.traits.ruler_on_paper) {
      if (s.traits.straight) add(g[6], s);
      if (s.traits.triangular) add(g[7], s);
    }
  }
  return g;
}

inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline std::string episodes_csv(const SuiteResult& r) {
  std::ostringstream o;
  o << "scenario,trial,outcome,cause,actions\n";
  for (const auto& e : r.rows)
    o << e.scenario << ',' << e.trial << ',' << to_string(e.outcome) << ',' << to_string(e.cause) << ','
      << e.actions << '\n';
  return o.str();
}

inline std::string scenarios_csv(const SuiteResult& r) {
  std::ostringstream o;
  o << "scenario,categories,ruler,trials,successes,rate\n";
  for (const auto& s : r.scenarios) {
    const char* ruler = !s.traits.has_ruler ? "none" : s.traits.triangular ? "triangular" : "straight";
    o << s.scenario << ',' << s.traits.categories << ',' << ruler << ',' << s.trials << ',' << s.successes << ','
      << fixed4(static_cast<double>(s.successes) / s.trials) << '\n';
  }
  return o.str();
}

inline std::string groups_csv(const std::vector<GroupStat>& g) {
  std::ostringstream o;
  o << "group,scenarios,episodes,successes,rate\n";
  for (const auto& s : g)
    o << s.group << ',' << s.scenarios << ',' << s.episodes << ',' << s.successes << ',' << fixed4(s.rate()) << '\n';
  return o.str();
}

}  // namespace deskorg
