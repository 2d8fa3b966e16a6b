#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "top/anonymity.hpp"

namespace top {

enum class PlannerKind { Pbp, MPbp, Rbp, Cbp, FullCover };

// One benchmark run; every randomized selection is fully determined by the
// declared seeds.
struct Scenario {
  std::string name;
  std::string map_path;                 // Moving AI map, or a fixture graph when
  bool is_fixture = false;              // is_fixture is set
  std::vector<std::pair<int, int>> s_g; // explicit cells; empty = random
  bool random_endpoints = false;
  std::vector<std::pair<int, int>> transit_cells;  // explicit; empty = sampled
  int transit_count = 0;
  int k = 2;
  Cost ell = 1;
  int m = kMInfinity;
  int r = 0;
  PlannerKind planner = PlannerKind::Pbp;
  PartitionerKind partitioner = PartitionerKind::MergeBB;
  MergeOrderKind merge_order = MergeOrderKind::CostAsc;
  Heuristic heuristic = Heuristic::Tunnel;
  double time_limit_s = 300;
  std::uint64_t seed = 0;
  bool report_time = true;  // false blanks total_time_s (reproducible CSVs)
};

struct ResultRow {
  std::string scenario, map, s, g;
  int n_transit = 0;
  int k = 0;
  Cost ell = 0;
  std::string m;
  int r = 0;
  std::string planner, partitioner, merge_order, heuristic;
  std::optional<double> apr, mac;
  bool coverage_completed = true;
  std::optional<double> total_time_s;
  std::int64_t wrpt_expansions = 0;
  std::int64_t evaluated_partitions = 0;
};

inline constexpr const char* kCsvHeader =
    "scenario,map,s,g,n_transit,k,l,m,r,planner,partitioner,merge_order,heuristic,apr,mac,"
    "coverage_completed,total_time_s,wrpt_expansions,evaluated_partitions";

// Parses a JSON config; array-valued scenario fields expand into their
// cross-product, one expanded scenario per combination.
std::vector<Scenario> load_config(const std::string& json_text);
std::vector<Scenario> load_config_file(const std::string& path);

ResultRow run_scenario(const Scenario& sc);

// Executes every scenario and writes the CSV. Returns the process exit code:
// 0 on full completion, 2 when any run timed out, 1 on configuration errors.
int run_harness(const std::vector<Scenario>& scenarios, std::ostream& out, int jobs = 1);

std::string csv_row(const ResultRow& row);

// Deterministic random scenario generation over a map: distinct passable
// s, g (g reachable from s) and transit candidates with s, g excluded.
std::vector<Scenario> gen_scenarios(const std::string& map_path, int count, std::uint64_t seed,
                                    int transit_count, int k, Cost ell, int r);
std::string scenarios_to_json(const std::vector<Scenario>& scenarios);

// ASCII rendering: '#' obstacle, '.' free, S/G endpoints (highest priority),
// subset members as digits, covered path cells as the subset's lowercase
// letter.
std::string render_ascii(const Domain& d, NodeId s, NodeId g, const Partition& partition);
std::string render_svg(const Domain& d, NodeId s, NodeId g, const Partition& partition);

// Runs the scenario's partitioner and renders the result both ways.
struct RenderedScenario {
  std::string ascii;
  std::string svg;
};
RenderedScenario render_scenario(const Scenario& sc);

}  // namespace top
