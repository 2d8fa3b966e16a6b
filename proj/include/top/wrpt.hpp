#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "top/domain.hpp"

namespace top {

// Wall-clock budget for a single search. Default is unlimited.
struct Deadline {
  std::optional<std::chrono::steady_clock::time_point> at;
  static Deadline unlimited() { return {}; }
  static Deadline after_seconds(double s) {
    Deadline d;
    d.at = std::chrono::steady_clock::now() +
           std::chrono::duration_cast<std::chrono::steady_clock::duration>(
               std::chrono::duration<double>(s));
    return d;
  }
  bool expired() const { return at && std::chrono::steady_clock::now() >= *at; }
};

enum class Heuristic { Blind, Tunnel };

enum class WrptOutcome { Solved, NoPath, TimedOut };

struct WrptResult {
  WrptOutcome outcome = WrptOutcome::NoPath;
  Path path;  // valid only when Solved
  std::int64_t expansions = 0;
  std::int64_t generated = 0;
  bool solved() const { return outcome == WrptOutcome::Solved; }
};

// Per-target distance fields backing the tunnel heuristic:
//   reach[i][n] = min over q in v_inv(targets[i]) of dist(n, q)
//   exit_cost[i] = min over q in v_inv(targets[i]) of dist(q, g)
// plus the plain cost-to-goal field for the all-covered case.
struct CoverFields {
  std::vector<NodeId> targets;
  std::vector<std::vector<Cost>> reach;
  std::vector<Cost> exit_cost;
  std::vector<Cost> to_goal;
};

CoverFields build_cover_fields(const Domain& d, NodeId g, const std::vector<NodeId>& targets);

Cost h_blind(NodeId node, std::uint32_t uncovered);
Cost h_tunnel(const CoverFields& fields, NodeId node, std::uint32_t uncovered);

// A* over <node, uncovered-bitmask> states. Solved paths are cost-optimal
// among all s -> g paths covering every target. TimedOut discards any
// incumbent: optimality is the contract.
WrptResult solve_wrpt(const Domain& d, NodeId s, NodeId g, const std::vector<NodeId>& targets,
                      Heuristic heuristic = Heuristic::Tunnel,
                      Deadline deadline = Deadline::unlimited());

// Independent uniform-cost oracle over the same product space, written
// without sharing the A* code path. Small instances only.
WrptResult oracle_wrpt(const Domain& d, NodeId s, NodeId g, const std::vector<NodeId>& targets);

// Oracle cost from an arbitrary mid-search state (used for admissibility
// checks): optimal cost from `node` to g while covering every target listed
// in `uncovered`.
Cost oracle_remaining_cost(const Domain& d, NodeId node, NodeId g,
                           const std::vector<NodeId>& uncovered);

}  // namespace top
