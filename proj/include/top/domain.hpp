#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "top/grid_map.hpp"

namespace top {

using NodeId = int;
using Cost = double;
inline constexpr Cost kInfCost = std::numeric_limits<Cost>::infinity();

struct Edge {
  NodeId to;
  Cost cost;
};

// Node sequence with its accumulated cost. Always non-empty; consecutive
// nodes are edges of the owning domain.
struct Path {
  std::vector<NodeId> nodes;
  Cost cost = 0;

  int length() const { return (int)nodes.size(); }
  NodeId front() const { return nodes.front(); }
  NodeId back() const { return nodes.back(); }
  bool operator==(const Path& o) const { return nodes == o.nodes; }
};

// Path-planning domain with visibility constraints. Immutable after
// construction; per-source distance fields are computed lazily behind a lock,
// so a Domain is safely shareable across concurrent solvers.
class Domain {
 public:
  Domain(std::string name, std::vector<std::vector<Edge>> adjacency, std::vector<NodeId> transit,
         int radius, bool undirected);

  static Domain from_grid(const GridMap& map, std::vector<NodeId> transit, int radius,
                          std::string name = "grid");

  const std::string& name() const { return name_; }
  int node_count() const { return (int)adj_.size(); }
  bool undirected() const { return undirected_; }
  int radius() const { return radius_; }
  const std::vector<NodeId>& transit() const { return transit_; }
  const std::vector<Edge>& neighbors(NodeId n) const { return adj_[n]; }

  // v(n): nodes visible from n; v_inv(n): nodes n is visible from. Sorted.
  const std::vector<NodeId>& visible_from(NodeId n) const { return vis_[n]; }
  const std::vector<NodeId>& visible_by(NodeId n) const { return vis_inv_[n]; }
  bool sees(NodeId from, NodeId target) const;

  // Shortest-path cost fields, cached per endpoint.
  const std::vector<Cost>& dist_from(NodeId source) const;
  const std::vector<Cost>& dist_to(NodeId sink) const;
  Cost dist(NodeId a, NodeId b) const { return dist_from(a)[b]; }

  // d(a,b) with the diagonal mapped to infinity; used only for the l
  // (dispersion) condition.
  Cost dispersion(NodeId a, NodeId b) const { return a == b ? kInfCost : dist(a, b); }

  // Deterministic min-cost path a -> b (ties resolved toward smaller node
  // index), or nullopt when unreachable.
  std::optional<Path> shortest_path(NodeId a, NodeId b) const;

  // Grid attachment (only for domains built from a GridMap).
  const GridMap* grid() const { return grid_ ? grid_.get() : nullptr; }
  NodeId node_at(int x, int y) const;                 // -1 when blocked/out of bounds
  std::pair<int, int> node_xy(NodeId n) const;        // valid only for grid domains

  Cost path_cost(const std::vector<NodeId>& nodes) const;  // throws on non-edges

 private:
  void build_visibility();

  std::string name_;
  std::vector<std::vector<Edge>> adj_;
  std::vector<std::vector<Edge>> radj_;
  std::vector<NodeId> transit_;
  int radius_;
  bool undirected_;
  std::vector<std::vector<NodeId>> vis_;
  std::vector<std::vector<NodeId>> vis_inv_;

  std::shared_ptr<GridMap> grid_;
  std::vector<int> cell_node_;                 // width*height -> node or -1
  std::vector<std::pair<int, int>> node_cell_;

  // Behind a pointer so Domain stays movable despite the mutex.
  struct DistCache {
    std::mutex mu;
    std::unordered_map<NodeId, std::vector<Cost>> fwd, bwd;
  };
  std::unique_ptr<DistCache> cache_ = std::make_unique<DistCache>();
};

// Min forward cost from every node to the nearest of `sinks` (multi-source
// search over reverse edges).
std::vector<Cost> cost_to_reach_any(const Domain& d, const std::vector<NodeId>& sinks);

Cost dispersion(const Domain& d, NodeId a, NodeId b);
bool covers(const Domain& d, const Path& path, NodeId n);
bool coverable(const Domain& d, NodeId s, NodeId g, NodeId t);

Path prefix(const Domain& d, const Path& path, int m);  // clamps: m >= |path| returns path
Path concat(const Domain& d, const Path& a, const Path& b);  // junction nodes must match

// PPVT instance: s != t, g != t enforced at construction.
struct ProblemTuple {
  const Domain* domain;
  NodeId s;
  NodeId g;
  NodeId t;
  ProblemTuple(const Domain& d, NodeId s_, NodeId g_, NodeId t_);
};

// Fixture graphs are shipped as edge-list text files: `node <name>`,
// `edge <from> <to> <cost>`, `transit <name>`, `start <name>`, `goal <name>`,
// optional `directed`. Costs on undirected graphs apply to both directions.
struct FixtureGraph {
  Domain domain;
  NodeId start;
  NodeId goal;
  std::unordered_map<std::string, NodeId> names;
};
FixtureGraph load_fixture_graph(const std::string& path, int radius);

}  // namespace top
