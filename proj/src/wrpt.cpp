#include "top/wrpt.hpp"

#include <algorithm>
#include <bit>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace top {

namespace {

constexpr int kMaxTargets = 32;
constexpr std::int64_t kDeadlineStride = 1024;

std::uint64_t state_key(NodeId node, std::uint32_t mask) {
  return (std::uint64_t)(std::uint32_t)node << 32 | mask;
}

// Bits of targets visible from each node.
std::vector<std::uint32_t> visible_target_masks(const Domain& d,
                                                const std::vector<NodeId>& targets) {
  std::vector<std::uint32_t> mask(d.node_count(), 0);
  for (int i = 0; i < (int)targets.size(); ++i)
    for (NodeId q : d.visible_by(targets[i])) mask[q] |= 1u << i;
  return mask;
}

}  // namespace

CoverFields build_cover_fields(const Domain& d, NodeId g, const std::vector<NodeId>& targets) {
  CoverFields f;
  f.targets = targets;
  f.to_goal = d.dist_to(g);
  for (NodeId u : targets) {
    f.reach.push_back(cost_to_reach_any(d, d.visible_by(u)));
    Cost best = kInfCost;
    for (NodeId q : d.visible_by(u)) best = std::min(best, f.to_goal[q]);
    f.exit_cost.push_back(best);
  }
  return f;
}

Cost h_blind(NodeId, std::uint32_t) { return 0; }

Cost h_tunnel(const CoverFields& fields, NodeId node, std::uint32_t uncovered) {
  if (uncovered == 0) return fields.to_goal[node];
  Cost reach = 0;
  Cost exit = kInfCost;
  for (int i = 0; i < (int)fields.targets.size(); ++i) {
    if (!(uncovered & (1u << i))) continue;
    reach = std::max(reach, fields.reach[i][node]);
    exit = std::min(exit, fields.exit_cost[i]);
  }
  return reach + exit;
}

WrptResult solve_wrpt(const Domain& d, NodeId s, NodeId g, const std::vector<NodeId>& targets,
                      Heuristic heuristic, Deadline deadline) {
  if ((int)targets.size() > kMaxTargets)
    throw std::invalid_argument("WRPT target set exceeds bit-set width");
  WrptResult res;
  const auto vmask = visible_target_masks(d, targets);
  const std::uint32_t full = targets.empty() ? 0 : (std::uint32_t)((1ull << targets.size()) - 1);
  CoverFields fields;
  if (heuristic == Heuristic::Tunnel) fields = build_cover_fields(d, g, targets);

  auto h = [&](NodeId n, std::uint32_t u) -> Cost {
    return heuristic == Heuristic::Tunnel ? h_tunnel(fields, n, u) : 0;
  };

  struct Entry {
    Cost f;
    int uncovered_count;
    Cost g_cost;
    NodeId node;
    std::uint32_t mask;
    // Ties: smaller |uncovered|, then larger g, then smaller node index.
    bool operator>(const Entry& o) const {
      if (f != o.f) return f > o.f;
      if (uncovered_count != o.uncovered_count) return uncovered_count > o.uncovered_count;
      if (g_cost != o.g_cost) return g_cost < o.g_cost;
      return node > o.node;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::unordered_map<std::uint64_t, Cost> best_g;
  std::unordered_map<std::uint64_t, std::uint64_t> parent;

  const std::uint32_t start_mask = full & ~vmask[s];
  Cost h0 = h(s, start_mask);
  if (h0 != kInfCost) {
    best_g[state_key(s, start_mask)] = 0;
    open.push({h0, std::popcount(start_mask), 0, s, start_mask});
    ++res.generated;
  }

  while (!open.empty()) {
    Entry cur = open.top();
    open.pop();
    std::uint64_t key = state_key(cur.node, cur.mask);
    auto it = best_g.find(key);
    if (it == best_g.end() || cur.g_cost > it->second) continue;  // stale
    if (cur.node == g && cur.mask == 0) {
      // Reconstruct.
      std::vector<NodeId> nodes;
      std::uint64_t k = key;
      while (true) {
        nodes.push_back((NodeId)(k >> 32));
        auto p = parent.find(k);
        if (p == parent.end()) break;
        k = p->second;
      }
      std::reverse(nodes.begin(), nodes.end());
      res.path.nodes = std::move(nodes);
      res.path.cost = cur.g_cost;
      res.outcome = WrptOutcome::Solved;
      return res;
    }
    ++res.expansions;
    if (deadline.at && res.expansions % kDeadlineStride == 0 && deadline.expired()) {
      res.outcome = WrptOutcome::TimedOut;
      return res;
    }
    for (const Edge& e : d.neighbors(cur.node)) {
      std::uint32_t nm = cur.mask & ~vmask[e.to];
      Cost ng = cur.g_cost + e.cost;
      std::uint64_t nk = state_key(e.to, nm);
      auto bit = best_g.find(nk);
      if (bit != best_g.end() && bit->second <= ng) continue;
      Cost hn = h(e.to, nm);
      if (hn == kInfCost) continue;  // dead state
      best_g[nk] = ng;
      parent[nk] = key;
      open.push({ng + hn, std::popcount(nm), ng, e.to, nm});
      ++res.generated;
    }
  }
  res.outcome = WrptOutcome::NoPath;
  return res;
}

namespace {

// The oracle avoids the A* machinery on purpose: plain uniform-cost search,
// coverage recomputed from the visibility lists at every step.
struct OracleState {
  NodeId node;
  std::uint32_t uncovered;
  bool operator==(const OracleState& o) const {
    return node == o.node && uncovered == o.uncovered;
  }
};

WrptResult oracle_search(const Domain& d, NodeId start, NodeId g,
                         const std::vector<NodeId>& targets, bool want_path) {
  WrptResult res;
  if ((int)targets.size() > kMaxTargets)
    throw std::invalid_argument("oracle target set exceeds bit-set width");
  auto covered_bits = [&](NodeId n) {
    std::uint32_t bits = 0;
    for (int i = 0; i < (int)targets.size(); ++i)
      if (d.sees(n, targets[i])) bits |= 1u << i;
    return bits;
  };
  std::uint32_t full = targets.empty() ? 0 : (std::uint32_t)((1ull << targets.size()) - 1);
  std::uint32_t init = full & ~covered_bits(start);

  std::unordered_map<std::uint64_t, Cost> settled_g;
  std::unordered_map<std::uint64_t, std::uint64_t> came_from;
  using QE = std::pair<Cost, std::uint64_t>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> open;
  std::unordered_map<std::uint64_t, Cost> seen;
  std::uint64_t init_key = state_key(start, init);
  seen[init_key] = 0;
  open.emplace(0.0, init_key);
  while (!open.empty()) {
    auto [c, key] = open.top();
    open.pop();
    if (seen[key] < c) continue;
    NodeId node = (NodeId)(key >> 32);
    std::uint32_t unc = (std::uint32_t)key;
    if (node == g && unc == 0) {
      res.outcome = WrptOutcome::Solved;
      res.path.cost = c;
      if (want_path) {
        std::vector<NodeId> nodes;
        std::uint64_t k = key;
        while (true) {
          nodes.push_back((NodeId)(k >> 32));
          auto p = came_from.find(k);
          if (p == came_from.end()) break;
          k = p->second;
        }
        std::reverse(nodes.begin(), nodes.end());
        res.path.nodes = std::move(nodes);
      }
      return res;
    }
    ++res.expansions;
    for (const Edge& e : d.neighbors(node)) {
      std::uint32_t nu = unc & ~covered_bits(e.to);
      Cost nc = c + e.cost;
      std::uint64_t nk = state_key(e.to, nu);
      auto it = seen.find(nk);
      if (it != seen.end() && it->second <= nc) continue;
      seen[nk] = nc;
      came_from[nk] = key;
      open.emplace(nc, nk);
      ++res.generated;
    }
  }
  res.outcome = WrptOutcome::NoPath;
  return res;
}

}  // namespace

WrptResult oracle_wrpt(const Domain& d, NodeId s, NodeId g, const std::vector<NodeId>& targets) {
  return oracle_search(d, s, g, targets, true);
}

Cost oracle_remaining_cost(const Domain& d, NodeId node, NodeId g,
                           const std::vector<NodeId>& uncovered) {
  // Coverage already granted to nodes behind us must not re-apply, except
  // that standing at `node` re-covers whatever it sees; that matches the
  // search state semantics where `uncovered` excludes v(node).
  auto r = oracle_search(d, node, g, uncovered, false);
  return r.solved() ? r.path.cost : kInfCost;
}

}  // namespace top
