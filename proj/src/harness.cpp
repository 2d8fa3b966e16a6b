#include "top/harness.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <future>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

namespace top {

namespace {

using nlohmann::json;

PlannerKind planner_from(const std::string& s) {
  if (s == "pbp") return PlannerKind::Pbp;
  if (s == "m_pbp") return PlannerKind::MPbp;
  if (s == "rbp") return PlannerKind::Rbp;
  if (s == "cbp") return PlannerKind::Cbp;
  if (s == "full_cover") return PlannerKind::FullCover;
  throw std::invalid_argument("unknown planner: " + s);
}

std::string planner_name(PlannerKind k) {
  switch (k) {
    case PlannerKind::Pbp: return "pbp";
    case PlannerKind::MPbp: return "m_pbp";
    case PlannerKind::Rbp: return "rbp";
    case PlannerKind::Cbp: return "cbp";
    case PlannerKind::FullCover: return "full_cover";
  }
  return "?";
}

PartitionerKind partitioner_from(const std::string& s) {
  if (s == "merge_bb") return PartitionerKind::MergeBB;
  if (s == "df_bb") return PartitionerKind::DfBB;
  if (s == "naive") return PartitionerKind::Naive;
  if (s == "exhaustive") return PartitionerKind::Exhaustive;
  throw std::invalid_argument("unknown partitioner: " + s);
}

std::string partitioner_name(PartitionerKind k) {
  switch (k) {
    case PartitionerKind::MergeBB: return "merge_bb";
    case PartitionerKind::DfBB: return "df_bb";
    case PartitionerKind::Naive: return "naive";
    case PartitionerKind::Exhaustive: return "exhaustive";
  }
  return "?";
}

std::string fmt6(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

std::pair<int, int> cell_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("cell must be [x, y]");
  return {j[0].get<int>(), j[1].get<int>()};
}

// Expands one scenario object; array-valued fields multiply combinations.
void expand_scenarios(const json& obj, double default_time_limit,
                      std::vector<Scenario>& out) {
  static const char* kMultiKeys[] = {"planner",     "partitioner", "merge_order",
                                     "heuristic",   "k",           "l",
                                     "m",           "r"};
  for (const char* key : kMultiKeys) {
    if (obj.contains(key) && obj[key].is_array()) {
      for (const auto& v : obj[key]) {
        json copy = obj;
        copy[key] = v;
        expand_scenarios(copy, default_time_limit, out);
      }
      return;
    }
  }
  Scenario sc;
  sc.name = obj.value("name", "scenario" + std::to_string(out.size()));
  if (obj.contains("fixture")) {
    sc.map_path = obj["fixture"].get<std::string>();
    sc.is_fixture = true;
  } else if (obj.contains("map")) {
    sc.map_path = obj["map"].get<std::string>();
  } else {
    throw std::invalid_argument("scenario needs a map or fixture");
  }
  if (!sc.is_fixture) {
    if (obj.contains("s") && obj["s"].is_array()) {
      sc.s_g.push_back(cell_from_json(obj["s"]));
      sc.s_g.push_back(cell_from_json(obj.at("g")));
    } else {
      sc.random_endpoints = true;
    }
    if (obj.contains("transit") && obj["transit"].is_array()) {
      for (const auto& c : obj["transit"]) sc.transit_cells.push_back(cell_from_json(c));
      sc.transit_count = (int)sc.transit_cells.size();
    } else if (obj.contains("transit")) {
      sc.transit_count = obj["transit"].get<int>();
    } else {
      throw std::invalid_argument("scenario needs a transit list or count");
    }
  }
  sc.k = obj.value("k", 2);
  sc.ell = obj.value("l", 1.0);
  if (obj.contains("m")) {
    if (obj["m"].is_string()) {
      if (obj["m"].get<std::string>() != "inf") throw std::invalid_argument("m must be int or \"inf\"");
      sc.m = kMInfinity;
    } else {
      sc.m = obj["m"].get<int>();
      if (sc.m < 1) throw std::invalid_argument("m must be positive");
    }
  }
  sc.r = obj.value("r", 0);
  sc.planner = planner_from(obj.value("planner", "pbp"));
  sc.partitioner = partitioner_from(obj.value("partitioner", "merge_bb"));
  std::string order = obj.value("merge_order", "cost_asc");
  if (order == "cost_asc") sc.merge_order = MergeOrderKind::CostAsc;
  else if (order == "random") sc.merge_order = MergeOrderKind::Random;
  else throw std::invalid_argument("unknown merge_order: " + order);
  std::string h = obj.value("heuristic", "tunnel");
  if (h == "tunnel") sc.heuristic = Heuristic::Tunnel;
  else if (h == "blind") sc.heuristic = Heuristic::Blind;
  else throw std::invalid_argument("unknown heuristic: " + h);
  sc.time_limit_s = obj.value("time_limit_s", default_time_limit);
  sc.seed = obj.value("seed", (std::uint64_t)0);
  sc.report_time = obj.value("report_time", true);
  out.push_back(std::move(sc));
}

// Deterministic endpoint/transit sampling over the map's passable cells.
struct SampledCells {
  std::pair<int, int> s, g;
  std::vector<std::pair<int, int>> transit;
};

bool grid_reachable(const GridMap& map, std::pair<int, int> a, std::pair<int, int> b) {
  std::vector<char> seen(map.width * map.height, 0);
  std::queue<std::pair<int, int>> q;
  q.push(a);
  seen[a.second * map.width + a.first] = 1;
  const int dx[4] = {0, 0, -1, 1}, dy[4] = {-1, 1, 0, 0};
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop();
    if (std::make_pair(x, y) == b) return true;
    for (int i = 0; i < 4; ++i) {
      int nx = x + dx[i], ny = y + dy[i];
      if (!map.in_bounds(nx, ny) || !map.passable(nx, ny)) continue;
      if (seen[ny * map.width + nx]) continue;
      seen[ny * map.width + nx] = 1;
      q.push({nx, ny});
    }
  }
  return false;
}

SampledCells sample_cells(const GridMap& map, std::mt19937_64& rng, int transit_count) {
  std::vector<std::pair<int, int>> cells;
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      if (map.passable(x, y)) cells.emplace_back(x, y);
  if ((int)cells.size() < transit_count + 2)
    throw std::invalid_argument("map has too few passable cells");
  const int kAttempts = 1000;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<std::pair<int, int>> order = cells;
    std::shuffle(order.begin(), order.end(), rng);
    auto s = order[0];
    // First reachable goal in shuffled order.
    size_t gi = 1;
    while (gi < order.size() && !grid_reachable(map, s, order[gi])) ++gi;
    if (gi == order.size()) continue;
    SampledCells out;
    out.s = s;
    out.g = order[gi];
    for (size_t i = 1; i < order.size() && (int)out.transit.size() < transit_count; ++i) {
      if (i == gi) continue;
      out.transit.push_back(order[i]);
    }
    if ((int)out.transit.size() == transit_count) return out;
  }
  throw std::runtime_error("could not sample a feasible scenario from the map");
}

struct Instance {
  Domain domain;
  NodeId s, g;
  std::string s_label, g_label;
};

Instance build_instance(const Scenario& sc) {
  if (sc.is_fixture) {
    FixtureGraph fg = load_fixture_graph(sc.map_path, sc.r);
    std::string s_label, g_label;
    for (const auto& [name, id] : fg.names) {
      if (id == fg.start) s_label = name;
      if (id == fg.goal) g_label = name;
    }
    return {std::move(fg.domain), fg.start, fg.goal, s_label, g_label};
  }
  GridMap map = load_map_file(sc.map_path);
  std::pair<int, int> s_cell, g_cell;
  std::vector<std::pair<int, int>> transit_cells = sc.transit_cells;
  if (sc.random_endpoints || transit_cells.empty()) {
    std::mt19937_64 rng(sc.seed);
    SampledCells sampled = sample_cells(map, rng, sc.transit_count);
    if (sc.random_endpoints) {
      s_cell = sampled.s;
      g_cell = sampled.g;
    } else {
      s_cell = sc.s_g[0];
      g_cell = sc.s_g[1];
    }
    if (transit_cells.empty()) {
      transit_cells = sampled.transit;
      std::erase_if(transit_cells, [&](auto c) { return c == s_cell || c == g_cell; });
      while ((int)transit_cells.size() > sc.transit_count) transit_cells.pop_back();
    }
  } else {
    s_cell = sc.s_g[0];
    g_cell = sc.s_g[1];
  }
  auto check_cell = [&](std::pair<int, int> c, const char* what) {
    if (!map.in_bounds(c.first, c.second) || !map.passable(c.first, c.second))
      throw std::invalid_argument(std::string(what) + " cell (" + std::to_string(c.first) + "," +
                                  std::to_string(c.second) + ") is not passable");
  };
  check_cell(s_cell, "start");
  check_cell(g_cell, "goal");
  for (auto c : transit_cells) check_cell(c, "transit");

  // Node ids need the final grid; build the domain, then translate.
  GridMap map_copy = map;
  std::vector<NodeId> transit_tmp;  // filled after construction below
  Domain d = Domain::from_grid(map_copy, {}, sc.r, sc.map_path);
  std::vector<NodeId> transit;
  for (auto c : transit_cells) transit.push_back(d.node_at(c.first, c.second));
  Domain final_d = Domain::from_grid(map_copy, transit, sc.r, sc.map_path);
  NodeId s = final_d.node_at(s_cell.first, s_cell.second);
  NodeId g = final_d.node_at(g_cell.first, g_cell.second);
  auto label = [](std::pair<int, int> c) {
    return std::to_string(c.first) + ":" + std::to_string(c.second);
  };
  return {std::move(final_d), s, g, label(s_cell), label(g_cell)};
}

}  // namespace

std::vector<Scenario> load_config(const std::string& json_text) {
  json cfg = json::parse(json_text);
  double default_tl = cfg.value("default_time_limit_s", 300.0);
  std::vector<Scenario> out;
  if (!cfg.contains("scenarios") || !cfg["scenarios"].is_array())
    throw std::invalid_argument("config needs a scenarios array");
  for (const auto& obj : cfg["scenarios"]) expand_scenarios(obj, default_tl, out);
  return out;
}

std::vector<Scenario> load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return load_config(ss.str());
}

ResultRow run_scenario(const Scenario& sc) {
  Instance inst = build_instance(sc);
  const Domain& d = inst.domain;
  if (sc.k > (int)d.transit().size())
    throw std::invalid_argument("k exceeds the number of transit candidates");

  ResultRow row;
  row.scenario = sc.name;
  row.map = sc.map_path;
  row.s = inst.s_label;
  row.g = inst.g_label;
  row.n_transit = (int)d.transit().size();
  row.k = sc.k;
  row.ell = sc.ell;
  row.m = sc.m == kMInfinity ? "inf" : std::to_string(sc.m);
  row.r = sc.r;
  row.planner = planner_name(sc.planner);
  bool uses_partitioner = sc.planner == PlannerKind::Pbp || sc.planner == PlannerKind::MPbp;
  row.partitioner = uses_partitioner ? partitioner_name(sc.partitioner) : "";
  row.merge_order = uses_partitioner && sc.partitioner == PartitionerKind::MergeBB
                        ? (sc.merge_order == MergeOrderKind::CostAsc ? "cost_asc" : "random")
                        : "";
  row.heuristic = sc.heuristic == Heuristic::Tunnel ? "tunnel" : "blind";

  PartitionParams params;
  params.k = sc.k;
  params.ell = sc.ell;
  params.order = sc.merge_order;
  params.heuristic = sc.heuristic;
  params.seed = sc.seed;
  params.time_limit_s = sc.time_limit_s;

  auto t0 = std::chrono::steady_clock::now();
  PlannerOutputs outputs;
  int effective_k = sc.k;
  Cost effective_ell = sc.ell;
  switch (sc.planner) {
    case PlannerKind::Pbp: {
      PbpPlanner p(d, inst.s, inst.g, sc.partitioner, params);
      outputs = collect_outputs(d, [&](NodeId t) { return p.plan(t); });
      row.coverage_completed = p.stats().completed;
      row.wrpt_expansions = p.stats().wrpt_expansions;
      row.evaluated_partitions = p.stats().evaluated_partitions;
      break;
    }
    case PlannerKind::MPbp: {
      PbpPlanner p(d, inst.s, inst.g, sc.partitioner, params);
      outputs = collect_outputs(d, [&](NodeId t) { return p.plan_bounded(t, sc.m); });
      row.coverage_completed = p.stats().completed;
      row.wrpt_expansions = p.stats().wrpt_expansions;
      row.evaluated_partitions = p.stats().evaluated_partitions;
      break;
    }
    case PlannerKind::Rbp: {
      RbpPlanner p(d, inst.s, inst.g, sc.m, sc.seed, sc.heuristic);
      outputs = collect_outputs(d, [&](NodeId t) { return p.plan(t); });
      break;
    }
    case PlannerKind::Cbp: {
      CbpPlanner p(d, inst.s, inst.g, sc.k, sc.m, sc.seed, sc.heuristic);
      outputs = collect_outputs(d, [&](NodeId t) { return p.plan(t); });
      effective_ell = 0;  // Cbp's guarantee is (k, 0, m)
      break;
    }
    case PlannerKind::FullCover: {
      FullCoverPlanner p(d, inst.s, inst.g, sc.heuristic);
      outputs = collect_outputs(d, [&](NodeId t) { return p.plan(t); });
      break;
    }
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (sc.report_time) row.total_time_s = elapsed;

  Metrics mx = evaluate_outputs(d, inst.s, inst.g, outputs, effective_k, effective_ell, sc.m,
                                sc.heuristic);
  row.apr = mx.apr;
  row.mac = mx.mac;
  return row;
}

std::string csv_row(const ResultRow& r) {
  std::ostringstream out;
  out << r.scenario << ',' << r.map << ',' << r.s << ',' << r.g << ',' << r.n_transit << ','
      << r.k << ',' << fmt6(r.ell) << ',' << r.m << ',' << r.r << ',' << r.planner << ','
      << r.partitioner << ',' << r.merge_order << ',' << r.heuristic << ','
      << (r.apr ? fmt6(*r.apr) : "") << ',' << (r.mac ? fmt6(*r.mac) : "") << ','
      << (r.coverage_completed ? "true" : "false") << ','
      << (r.total_time_s ? fmt6(*r.total_time_s) : "") << ',' << r.wrpt_expansions << ','
      << r.evaluated_partitions;
  return out.str();
}

int run_harness(const std::vector<Scenario>& scenarios, std::ostream& out, int jobs) {
  std::vector<ResultRow> rows(scenarios.size());
  try {
    if (jobs <= 1) {
      for (size_t i = 0; i < scenarios.size(); ++i) rows[i] = run_scenario(scenarios[i]);
    } else {
      // Parallel slots; rows keep deterministic scenario order regardless of
      // completion order.
      for (size_t base = 0; base < scenarios.size(); base += jobs) {
        std::vector<std::future<ResultRow>> futs;
        for (size_t i = base; i < std::min(scenarios.size(), base + jobs); ++i)
          futs.push_back(std::async(std::launch::async,
                                    [&scenarios, i] { return run_scenario(scenarios[i]); }));
        for (size_t i = 0; i < futs.size(); ++i) rows[base + i] = futs[i].get();
      }
    }
  } catch (const std::exception&) {
    throw;  // configuration errors surface to the caller (exit code 1)
  }
  out << kCsvHeader << "\n";
  bool any_timeout = false;
  for (const auto& r : rows) {
    out << csv_row(r) << "\n";
    if (!r.coverage_completed) any_timeout = true;
  }
  return any_timeout ? 2 : 0;
}

std::vector<Scenario> gen_scenarios(const std::string& map_path, int count, std::uint64_t seed,
                                    int transit_count, int k, Cost ell, int r) {
  GridMap map = load_map_file(map_path);
  std::mt19937_64 rng(seed);
  std::vector<Scenario> out;
  for (int i = 0; i < count; ++i) {
    SampledCells cells = sample_cells(map, rng, transit_count);
    Scenario sc;
    sc.name = "gen" + std::to_string(i);
    sc.map_path = map_path;
    sc.s_g = {cells.s, cells.g};
    sc.transit_cells = cells.transit;
    sc.transit_count = transit_count;
    sc.k = k;
    sc.ell = ell;
    sc.r = r;
    sc.seed = seed + i;
    out.push_back(std::move(sc));
  }
  return out;
}

std::string scenarios_to_json(const std::vector<Scenario>& scenarios) {
  json arr = json::array();
  for (const auto& sc : scenarios) {
    json o;
    o["name"] = sc.name;
    o["map"] = sc.map_path;
    o["s"] = {sc.s_g[0].first, sc.s_g[0].second};
    o["g"] = {sc.s_g[1].first, sc.s_g[1].second};
    json transit = json::array();
    for (auto c : sc.transit_cells) transit.push_back({c.first, c.second});
    o["transit"] = transit;
    o["k"] = sc.k;
    o["l"] = sc.ell;
    o["m"] = sc.m == kMInfinity ? json("inf") : json(sc.m);
    o["r"] = sc.r;
    o["seed"] = sc.seed;
    arr.push_back(std::move(o));
  }
  json cfg;
  cfg["scenarios"] = arr;
  return cfg.dump(2) + "\n";
}

RenderedScenario render_scenario(const Scenario& sc) {
  Instance inst = build_instance(sc);
  PartitionParams params;
  params.k = sc.k;
  params.ell = sc.ell;
  params.order = sc.merge_order;
  params.heuristic = sc.heuristic;
  params.seed = sc.seed;
  params.time_limit_s = sc.time_limit_s;
  PartitionResult res = run_partitioner(inst.domain, inst.s, inst.g, sc.partitioner, params);
  return {render_ascii(inst.domain, inst.s, inst.g, res.partition),
          render_svg(inst.domain, inst.s, inst.g, res.partition)};
}

std::string render_ascii(const Domain& d, NodeId s, NodeId g, const Partition& partition) {
  const GridMap* map = d.grid();
  if (!map) return serialize_partition(partition);
  std::vector<std::string> canvas(map->height, std::string(map->width, '.'));
  for (int y = 0; y < map->height; ++y)
    for (int x = 0; x < map->width; ++x)
      if (!map->passable(x, y)) canvas[y][x] = '#';
  for (int i = 0; i < (int)partition.subsets.size(); ++i) {
    const auto& sub = partition.subsets[i];
    if (sub.covering_path)
      for (NodeId n : sub.covering_path->nodes) {
        auto [x, y] = d.node_xy(n);
        if (canvas[y][x] == '.') canvas[y][x] = (char)('a' + i % 26);
      }
  }
  for (int i = 0; i < (int)partition.subsets.size(); ++i)
    for (NodeId t : partition.subsets[i].members) {
      auto [x, y] = d.node_xy(t);
      canvas[y][x] = (char)('1' + i % 9);
    }
  for (NodeId t : partition.bucket) {
    auto [x, y] = d.node_xy(t);
    canvas[y][x] = '?';
  }
  {
    auto [x, y] = d.node_xy(s);
    canvas[y][x] = 'S';
  }
  {
    auto [x, y] = d.node_xy(g);
    canvas[y][x] = 'G';
  }
  std::string out;
  for (const auto& row : canvas) out += row + "\n";
  return out;
}

std::string render_svg(const Domain& d, NodeId s, NodeId g, const Partition& partition) {
  const GridMap* map = d.grid();
  if (!map) return "";
  static const char* kColors[] = {"#e6194b", "#3cb44b", "#4363d8", "#f58231",
                                  "#911eb4", "#46f0f0", "#f032e6", "#808000"};
  const int cs = 16;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << map->width * cs
      << "\" height=\"" << map->height * cs << "\">\n";
  for (int y = 0; y < map->height; ++y)
    for (int x = 0; x < map->width; ++x)
      out << "<rect x=\"" << x * cs << "\" y=\"" << y * cs << "\" width=\"" << cs
          << "\" height=\"" << cs << "\" fill=\"" << (map->passable(x, y) ? "#ffffff" : "#333333")
          << "\" stroke=\"#dddddd\"/>\n";
  for (int i = 0; i < (int)partition.subsets.size(); ++i) {
    const auto& sub = partition.subsets[i];
    const char* color = kColors[i % 8];
    if (sub.covering_path) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-opacity=\"0.45\" stroke-width=\"4\" points=\"";
      for (NodeId n : sub.covering_path->nodes) {
        auto [x, y] = d.node_xy(n);
        out << x * cs + cs / 2 << ',' << y * cs + cs / 2 << ' ';
      }
      out << "\"/>\n";
    }
    for (NodeId t : sub.members) {
      auto [x, y] = d.node_xy(t);
      out << "<rect x=\"" << x * cs << "\" y=\"" << y * cs << "\" width=\"" << cs
          << "\" height=\"" << cs << "\" fill=\"" << color << "\"/>\n";
    }
  }
  auto endpoint = [&](NodeId n, const char* fill, const char* text) {
    auto [x, y] = d.node_xy(n);
    std::ostringstream e;
    e << "<rect x=\"" << x * cs << "\" y=\"" << y * cs << "\" width=\"" << cs << "\" height=\""
      << cs << "\" fill=\"" << fill << "\"/><text x=\"" << x * cs + 4 << "\" y=\""
      << y * cs + 12 << "\" font-size=\"10\">" << text << "</text>\n";
    return e.str();
  };
  out << endpoint(s, "#00e5ff", "S") << endpoint(g, "#00c853", "G");
  out << "</svg>\n";
  return out.str();
}

}  // namespace top
