#include "top/domain.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace top {

namespace {

// Dijkstra over an adjacency structure; unit-cost grids degenerate to BFS
// behavior with the same result.
std::vector<Cost> dijkstra(const std::vector<std::vector<Edge>>& adj, NodeId source,
                           Cost bound = kInfCost) {
  std::vector<Cost> dist(adj.size(), kInfCost);
  using QE = std::pair<Cost, NodeId>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> open;
  dist[source] = 0;
  open.emplace(0.0, source);
  while (!open.empty()) {
    auto [d, n] = open.top();
    open.pop();
    if (d > dist[n]) continue;
    for (const Edge& e : adj[n]) {
      Cost nd = d + e.cost;
      if (nd > bound) continue;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        open.emplace(nd, e.to);
      }
    }
  }
  return dist;
}

}  // namespace

Domain::Domain(std::string name, std::vector<std::vector<Edge>> adjacency,
               std::vector<NodeId> transit, int radius, bool undirected)
    : name_(std::move(name)),
      adj_(std::move(adjacency)),
      transit_(std::move(transit)),
      radius_(radius),
      undirected_(undirected) {
  if (radius_ < 0) throw std::invalid_argument("visibility radius must be non-negative");
  for (NodeId n = 0; n < node_count(); ++n) {
    std::set<NodeId> targets;
    for (const Edge& e : adj_[n]) {
      if (e.to == n) throw std::invalid_argument("self-loop edge on node " + std::to_string(n));
      if (e.to < 0 || e.to >= node_count()) throw std::invalid_argument("edge endpoint out of range");
      if (e.cost < 0) throw std::invalid_argument("negative edge cost");
      if (!targets.insert(e.to).second)
        throw std::invalid_argument("duplicate edge from node " + std::to_string(n));
    }
  }
  std::set<NodeId> seen;
  for (NodeId t : transit_) {
    if (t < 0 || t >= node_count()) throw std::invalid_argument("transit node out of range");
    if (!seen.insert(t).second)
      throw std::invalid_argument("duplicate transit node " + std::to_string(t));
  }
  radj_.resize(adj_.size());
  for (NodeId n = 0; n < node_count(); ++n)
    for (const Edge& e : adj_[n]) radj_[e.to].push_back({n, e.cost});
  build_visibility();
}

void Domain::build_visibility() {
  // Visibility is through-free-cell shortest-path distance <= r; walls block
  // sight. r = 0 means a node sees only itself.
  vis_.resize(adj_.size());
  vis_inv_.resize(adj_.size());
  for (NodeId n = 0; n < node_count(); ++n) {
    if (radius_ == 0) {
      vis_[n] = {n};
      continue;
    }
    auto dist = dijkstra(adj_, n, (Cost)radius_);
    for (NodeId q = 0; q < node_count(); ++q)
      if (dist[q] <= (Cost)radius_) vis_[n].push_back(q);
  }
  for (NodeId n = 0; n < node_count(); ++n)
    for (NodeId q : vis_[n]) vis_inv_[q].push_back(n);
  for (auto& v : vis_inv_) std::sort(v.begin(), v.end());
}

bool Domain::sees(NodeId from, NodeId target) const {
  const auto& v = vis_[from];
  return std::binary_search(v.begin(), v.end(), target);
}

Domain Domain::from_grid(const GridMap& map, std::vector<NodeId> transit, int radius,
                         std::string name) {
  // Row-major indexing over passable cells; 4-connected unit-cost movement.
  std::vector<int> cell_node(map.width * map.height, -1);
  std::vector<std::pair<int, int>> node_cell;
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      if (map.passable(x, y)) {
        cell_node[y * map.width + x] = (int)node_cell.size();
        node_cell.emplace_back(x, y);
      }
  std::vector<std::vector<Edge>> adj(node_cell.size());
  const int dx[4] = {0, 0, -1, 1};
  const int dy[4] = {-1, 1, 0, 0};
  for (int n = 0; n < (int)node_cell.size(); ++n) {
    auto [x, y] = node_cell[n];
    for (int k = 0; k < 4; ++k) {
      int nx = x + dx[k], ny = y + dy[k];
      if (!map.in_bounds(nx, ny)) continue;
      int m = cell_node[ny * map.width + nx];
      if (m >= 0) adj[n].push_back({m, 1.0});
    }
  }
  Domain d(std::move(name), std::move(adj), std::move(transit), radius, true);
  d.grid_ = std::make_shared<GridMap>(map);
  d.cell_node_ = std::move(cell_node);
  d.node_cell_ = std::move(node_cell);
  return d;
}

NodeId Domain::node_at(int x, int y) const {
  if (!grid_ || !grid_->in_bounds(x, y)) return -1;
  return cell_node_[y * grid_->width + x];
}

std::pair<int, int> Domain::node_xy(NodeId n) const {
  if (!grid_) throw std::logic_error("node_xy on non-grid domain");
  return node_cell_[n];
}

const std::vector<Cost>& Domain::dist_from(NodeId source) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto it = cache_->fwd.find(source);
  if (it == cache_->fwd.end()) it = cache_->fwd.emplace(source, dijkstra(adj_, source)).first;
  return it->second;
}

const std::vector<Cost>& Domain::dist_to(NodeId sink) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto it = cache_->bwd.find(sink);
  if (it == cache_->bwd.end()) it = cache_->bwd.emplace(sink, dijkstra(radj_, sink)).first;
  return it->second;
}

std::optional<Path> Domain::shortest_path(NodeId a, NodeId b) const {
  const auto& to_b = dist_to(b);
  if (to_b[a] == kInfCost) return std::nullopt;
  Path p;
  p.nodes.push_back(a);
  NodeId cur = a;
  while (cur != b) {
    NodeId best = -1;
    Cost best_edge = 0;
    for (const Edge& e : adj_[cur]) {
      if (to_b[e.to] == kInfCost) continue;
      if (e.cost + to_b[e.to] == to_b[cur] && (best == -1 || e.to < best)) {
        best = e.to;
        best_edge = e.cost;
      }
    }
    if (best == -1) return std::nullopt;  // inconsistent field; unreachable in practice
    p.nodes.push_back(best);
    p.cost += best_edge;
    cur = best;
  }
  return p;
}

Cost Domain::path_cost(const std::vector<NodeId>& nodes) const {
  Cost total = 0;
  for (size_t i = 1; i < nodes.size(); ++i) {
    bool found = false;
    for (const Edge& e : adj_[nodes[i - 1]])
      if (e.to == nodes[i]) {
        total += e.cost;
        found = true;
        break;
      }
    if (!found)
      throw std::invalid_argument("path step " + std::to_string(nodes[i - 1]) + "->" +
                                  std::to_string(nodes[i]) + " is not an edge");
  }
  return total;
}

std::vector<Cost> cost_to_reach_any(const Domain& d, const std::vector<NodeId>& sinks) {
  std::vector<std::vector<Edge>> radj(d.node_count());
  for (NodeId n = 0; n < d.node_count(); ++n)
    for (const Edge& e : d.neighbors(n)) radj[e.to].push_back({n, e.cost});
  std::vector<Cost> dist(d.node_count(), kInfCost);
  using QE = std::pair<Cost, NodeId>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> open;
  for (NodeId s : sinks) {
    dist[s] = 0;
    open.emplace(0.0, s);
  }
  while (!open.empty()) {
    auto [c, n] = open.top();
    open.pop();
    if (c > dist[n]) continue;
    for (const Edge& e : radj[n]) {
      Cost nc = c + e.cost;
      if (nc < dist[e.to]) {
        dist[e.to] = nc;
        open.emplace(nc, e.to);
      }
    }
  }
  return dist;
}

Cost dispersion(const Domain& d, NodeId a, NodeId b) { return d.dispersion(a, b); }

bool covers(const Domain& d, const Path& path, NodeId n) {
  for (NodeId p : path.nodes)
    if (d.sees(p, n)) return true;
  return false;
}

bool coverable(const Domain& d, NodeId s, NodeId g, NodeId t) {
  const auto& from_s = d.dist_from(s);
  const auto& to_g = d.dist_to(g);
  for (NodeId q : d.visible_by(t))
    if (from_s[q] != kInfCost && to_g[q] != kInfCost) return true;
  return false;
}

Path prefix(const Domain& d, const Path& path, int m) {
  if (m >= path.length()) return path;
  if (m < 1) throw std::invalid_argument("prefix length must be positive");
  Path p;
  p.nodes.assign(path.nodes.begin(), path.nodes.begin() + m);
  p.cost = d.path_cost(p.nodes);
  return p;
}

Path concat(const Domain& d, const Path& a, const Path& b) {
  if (a.back() != b.front()) throw std::invalid_argument("concat junction mismatch");
  Path p = a;
  p.nodes.insert(p.nodes.end(), b.nodes.begin() + 1, b.nodes.end());
  p.cost = d.path_cost(p.nodes);
  return p;
}

ProblemTuple::ProblemTuple(const Domain& d, NodeId s_, NodeId g_, NodeId t_)
    : domain(&d), s(s_), g(g_), t(t_) {
  if (s == t || g == t) throw std::invalid_argument("transit point must differ from start and goal");
}

FixtureGraph load_fixture_graph(const std::string& path, int radius) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open fixture graph: " + path);
  std::unordered_map<std::string, NodeId> names;
  std::vector<std::string> order;
  struct RawEdge {
    std::string a, b;
    Cost c;
  };
  std::vector<RawEdge> edges;
  std::vector<std::string> transit_names;
  std::string start_name, goal_name;
  bool directed = false;
  std::string line;
  int lineno = 0;
  auto intern = [&](const std::string& s) {
    auto it = names.find(s);
    if (it == names.end()) {
      it = names.emplace(s, (NodeId)order.size()).first;
      order.push_back(s);
    }
    return it->second;
  };
  while (std::getline(f, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    if (key == "node") {
      std::string n;
      ls >> n;
      intern(n);
    } else if (key == "edge") {
      RawEdge e;
      if (!(ls >> e.a >> e.b >> e.c)) throw ParseError("malformed edge", lineno);
      edges.push_back(e);
    } else if (key == "transit") {
      std::string n;
      while (ls >> n) transit_names.push_back(n);
    } else if (key == "start") {
      ls >> start_name;
    } else if (key == "goal") {
      ls >> goal_name;
    } else if (key == "directed") {
      directed = true;
    } else if (key == "undirected") {
      directed = false;
    } else {
      throw ParseError("unknown fixture directive '" + key + "'", lineno);
    }
  }
  if (start_name.empty() || goal_name.empty())
    throw std::runtime_error("fixture graph needs start and goal declarations");
  for (const auto& e : edges) {
    intern(e.a);
    intern(e.b);
  }
  std::vector<std::vector<Edge>> adj(order.size());
  for (const auto& e : edges) {
    NodeId a = names[e.a], b = names[e.b];
    adj[a].push_back({b, e.c});
    if (!directed) adj[b].push_back({a, e.c});
  }
  std::vector<NodeId> transit;
  for (const auto& n : transit_names) transit.push_back(intern(n));
  Domain d(path, std::move(adj), std::move(transit), radius, !directed);
  return FixtureGraph{std::move(d), names[start_name], names[goal_name], std::move(names)};
}

}  // namespace top
