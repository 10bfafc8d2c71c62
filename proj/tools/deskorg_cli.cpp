// deskorg: run desk-organization episodes, the scenario suite, renders and
// table dumps from the command line.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "deskorg/feasibility.hpp"
#include "deskorg/io.hpp"
#include "deskorg/planner.hpp"
#include "deskorg/scenario.hpp"
#include "deskorg/suite.hpp"

namespace fs = std::filesystem;
using namespace deskorg;

namespace {

struct RunConfig {
  std::string scene_path;
  std::string scenario;
  std::string mode = "deterministic";
  int trials = 5;
  std::uint64_t seed = 0;
  std::string out;
  std::optional<double> theta_p_deg, theta_g_deg, overhang, noise_scale;
  std::string catalog_dir;
  bool frames = true;
};

std::string default_out() {
  const char* env = std::getenv("DESKORG_OUT_DIR");
  return env && *env ? env : "deskorg_out";
}

ExecMode parse_mode(const std::string& m) {
  if (m == "deterministic") return ExecMode::deterministic;
  if (m == "stochastic") return ExecMode::stochastic;
  throw Error(ErrorCode::degenerate_input, "unknown mode '" + m + "'");
}

SimConfig sim_config(const RunConfig& rc, ExecMode mode) {
  SimConfig cfg;
  cfg.noise_scale = mode == ExecMode::stochastic ? 1.0 : 0.0;
  if (rc.noise_scale) cfg.noise_scale = *rc.noise_scale;
  if (rc.theta_p_deg) cfg.prim.theta_p = deg2rad(*rc.theta_p_deg);
  if (rc.theta_g_deg) cfg.prim.theta_g = deg2rad(*rc.theta_g_deg);
  if (rc.overhang) cfg.prim.overhang_delta = *rc.overhang;
  cfg.prim.validate();
  if (cfg.noise_scale < 0.0) throw Error(ErrorCode::degenerate_input, "noise scale must be non-negative");
  return cfg;
}

Scene scene_source(const RunConfig& rc) {
  if (!rc.scene_path.empty() && !rc.scenario.empty())
    throw Error(ErrorCode::degenerate_input, "give either --scene or --scenario, not both");
  if (!rc.scene_path.empty()) return load_scene(rc.scene_path);
  if (!rc.scenario.empty()) return generate_scenario(parse_spec(rc.scenario), 0);
  throw Error(ErrorCode::degenerate_input, "a scene source is required (--scene or --scenario)");
}

fs::path out_dir(const RunConfig& rc) {
  fs::path p = rc.out.empty() ? default_out() : rc.out;
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create '" + p.string() + "': " + ec.message());
  return p;
}

std::string frame_name(const std::string& label, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return label + "_frame_" + buf + ".svg";
}

int cmd_organize(const RunConfig& rc) {
  const ExecMode mode = parse_mode(rc.mode);
  const SimConfig cfg = sim_config(rc, mode);
  Scene scene = scene_source(rc);
  if (scene.label.empty()) scene.label = fs::path(rc.scene_path).stem().string();
  const fs::path dir = out_dir(rc);
  std::optional<Plan> built;
  try {
    built = build_plan(scene, cfg);
  } catch (const Error&) {
  }
  if (rc.frames) write_text((dir / frame_name(scene.label, 0)).string(), render_svg(scene));
  StepObserver obs;
  if (rc.frames)
    obs = [&](std::size_t i, const Scene& s) { write_text((dir / frame_name(scene.label, i + 1)).string(), render_svg(s)); };
  const TaskReport r = run_episode(scene, mode, rc.seed, cfg, built ? &*built : nullptr, obs);
  const fs::path report = dir / (scene.label + "_report.json");
  write_text(report.string(), dump_report(r, built ? &*built : nullptr));
  std::cout << scene.label << ": " << to_string(r.outcome);
  if (r.failure)
    std::cout << " (" << to_string(r.failure->cause) << ") at action " << r.failure->action_index << " ["
              << to_string(r.failure->kind) << ' ' << r.failure->object_id << "]";
  std::cout << ", " << r.completed_actions << '/' << r.total_actions << " actions\n";
  std::cout << "report: " << report.string() << '\n';
  return 0;
}

int cmd_suite(const RunConfig& rc) {
  const ExecMode mode = parse_mode(rc.mode);
  const SimConfig cfg = sim_config(rc, mode);
  const auto catalog = rc.catalog_dir.empty() ? generate_catalog() : load_catalog(rc.catalog_dir);
  const SuiteResult res = run_suite(catalog, {rc.trials, rc.seed, mode, true}, cfg);
  const auto groups = group_stats(res);
  const fs::path dir = out_dir(rc);
  write_text((dir / "episodes.csv").string(), episodes_csv(res));
  write_text((dir / "scenarios.csv").string(), scenarios_csv(res));
  write_text((dir / "groups.csv").string(), groups_csv(groups));
  for (const auto& s : res.scenarios) std::cout << s.scenario << ' ' << s.successes << '/' << s.trials << '\n';
  std::cout << groups_csv(groups);
  std::cout << "written: " << (dir / "episodes.csv").string() << '\n';
  return 0;
}

int cmd_render(const RunConfig& rc) {
  const Scene scene = scene_source(rc);
  const std::string svg = render_svg(scene);
  if (rc.out.empty() || rc.out == "-") {
    std::cout << svg;
  } else {
    const fs::path p(rc.out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_text(p.string(), svg);
  }
  return 0;
}

int cmd_feasibility_dump(const RunConfig& rc) {
  const std::string csv = to_csv(FeasibilityTables::calibrated());
  if (rc.out.empty() || rc.out == "-")
    std::cout << csv;
  else
    write_text(rc.out, csv);
  return 0;
}

int cmd_catalog(const RunConfig& rc) {
  const fs::path dir = out_dir(rc);
  for (const auto& s : generate_catalog(rc.seed)) save_scene((dir / (s.label + ".json")).string(), s);
  std::cout << "wrote " << all_specs().size() << " scenes to " << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-organization manipulation planning toolkit"};
  app.require_subcommand(1);
  RunConfig rc;

  auto add_scene = [&](CLI::App* c) {
    c->add_option("--scene", rc.scene_path, "Scene JSON file");
    c->add_option("--scenario", rc.scenario, "Golden scenario label, e.g. C311");
  };
  auto add_run = [&](CLI::App* c) {
    c->add_option("--mode", rc.mode, "deterministic or stochastic")->check(CLI::IsMember({"deterministic", "stochastic"}));
    c->add_option("--seed", rc.seed, "Episode seed");
    c->add_option("--theta-p", rc.theta_p_deg, "Push-pose tilt, degrees");
    c->add_option("--theta-g", rc.theta_g_deg, "Grasp-pose tilt, degrees");
    c->add_option("--overhang", rc.overhang, "Push overhang, meters");
    c->add_option("--noise-scale", rc.noise_scale, "Multiplier on in-hand noise");
  };

  auto* organize = app.add_subcommand("organize", "Plan and execute one episode");
  add_scene(organize);
  add_run(organize);
  organize->add_option("--out", rc.out, "Output directory (default $DESKORG_OUT_DIR or ./deskorg_out)");
  organize->add_flag("!--no-frames", rc.frames, "Skip per-step SVG frames");

  auto* suite = app.add_subcommand("suite", "Run all 36 golden scenarios");
  add_run(suite);
  suite->add_option("--trials", rc.trials, "Trials per scenario")->check(CLI::PositiveNumber);
  suite->add_option("--out", rc.out, "Output directory (default $DESKORG_OUT_DIR or ./deskorg_out)");
  suite->add_option("--catalog", rc.catalog_dir, "Load scenes from this directory instead of generating them");

  auto* render = app.add_subcommand("render", "Top-down SVG of a scene");
  add_scene(render);
  render->add_option("--out", rc.out, "SVG file (default stdout)");

  auto* dump = app.add_subcommand("feasibility-dump", "Write the feasibility tables as CSV");
  dump->add_option("--out", rc.out, "CSV file (default stdout)");

  auto* catalog = app.add_subcommand("catalog", "Write the golden scenario catalog as JSON");
  catalog->add_option("--out", rc.out, "Output directory");
  catalog->add_option("--seed", rc.seed, "Generator seed (the shipped catalog uses 0)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*organize) return cmd_organize(rc);
    if (*suite) return cmd_suite(rc);
    if (*render) return cmd_render(rc);
    if (*dump) return cmd_feasibility_dump(rc);
    if (*catalog) return cmd_catalog(rc);
  } catch (const Error& e) {
    std::cerr << "deskorg: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "deskorg: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
