#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "top/harness.hpp"

using namespace top;

namespace {

int cmd_run(const std::string& config, const std::string& out_path, int jobs) {
  std::vector<Scenario> scenarios = load_config_file(config);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return 1;
    }
    return run_harness(scenarios, out, jobs);
  }
  return run_harness(scenarios, std::cout, jobs);
}

int cmd_render(const std::string& config, const std::string& svg_path) {
  std::vector<Scenario> scenarios = load_config_file(config);
  bool svg_written = false;
  for (const auto& sc : scenarios) {
    RenderedScenario r = render_scenario(sc);
    std::cout << "== " << sc.name << " ==\n" << r.ascii;
    if (!svg_path.empty() && !svg_written && !r.svg.empty()) {
      std::ofstream out(svg_path);
      if (!out) {
        std::cerr << "cannot write " << svg_path << "\n";
        return 1;
      }
      out << r.svg;  // first grid scenario only
      svg_written = true;
    }
  }
  return 0;
}

int cmd_gen(const std::string& map, int count, std::uint64_t seed, int transit, int k, double ell,
            int r) {
  std::vector<Scenario> scenarios = gen_scenarios(map, count, seed, transit, k, ell, r);
  std::cout << scenarios_to_json(scenarios);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transit obfuscation planner harness"};
  app.require_subcommand(1);

  std::string config, out_path, svg_path, map;
  int jobs = 1, count = 5, transit = 8, k = 2, r = 0;
  double ell = 1.0;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "execute a scenario config, emit CSV");
  run->add_option("config", config)->required();
  run->add_option("--out", out_path, "CSV output file (default: stdout)");
  run->add_option("--jobs", jobs, "parallel worker slots");

  auto* render = app.add_subcommand("render", "ASCII/SVG rendering of scenario partitions");
  render->add_option("config", config)->required();
  render->add_option("--svg", svg_path, "SVG output file");

  auto* gen = app.add_subcommand("gen", "sample random scenarios from a map");
  gen->add_option("map", map)->required();
  gen->add_option("--count", count)->required();
  gen->add_option("--seed", seed)->required();
  gen->add_option("--transit", transit, "transit candidates per scenario");
  gen->add_option("--k", k);
  gen->add_option("--l", ell);
  gen->add_option("--r", r, "visibility radius");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config, out_path, jobs);
    if (render->parsed()) return cmd_render(config, svg_path);
    return cmd_gen(map, count, seed, transit, k, ell, r);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
