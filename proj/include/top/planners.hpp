#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "top/partition.hpp"

namespace top {

// m = infinity sentinel: "compare / keep whole paths".
inline constexpr int kMInfinity = std::numeric_limits<int>::max();

// A planner answer. An empty path means Failure; Failure never compares
// equal to anything, including itself — the verifiers enforce that rule.
struct PlanResult {
  std::optional<Path> path;
  int group_id = -1;  // subset or cluster id, -1 when not applicable
  bool failed() const { return !path.has_value(); }
};

using PlanFn = std::function<PlanResult(NodeId)>;

enum class PartitionerKind { MergeBB, DfBB, Naive, Exhaustive };

PartitionResult run_partitioner(const Domain& d, NodeId s, NodeId g, PartitionerKind kind,
                                const PartitionParams& params);

// Partitioning-based planner: one preprocessing pass independent of t, then
// table lookups. All queries for any t reuse the cached partition.
class PbpPlanner {
 public:
  PbpPlanner(const Domain& d, NodeId s, NodeId g, PartitionerKind kind,
             const PartitionParams& params);

  const Partition& partition() const { return result_.partition; }
  const PartitionSearchStats& stats() const { return result_.stats; }
  PlanResult plan(NodeId t) const;

  // m-Pbp: prefix of the Pbp path, then the unanonymized shortest completion
  // covering t. Bucket candidates fail, mirroring Pbp.
  PlanResult plan_bounded(NodeId t, int m) const;

  const Domain& domain() const { return d_; }
  NodeId start() const { return s_; }
  NodeId goal() const { return g_; }

 private:
  const Domain& d_;
  NodeId s_, g_;
  Heuristic heuristic_;
  PartitionResult result_;
  std::unordered_map<NodeId, int> subset_of_;
};

// Random-walk-prefix planner. The walk is seeded from the instance and the
// user seed, never from t, so the first m nodes are identical across all
// transit candidates.
class RbpPlanner {
 public:
  RbpPlanner(const Domain& d, NodeId s, NodeId g, int m, std::uint64_t seed,
             Heuristic heuristic = Heuristic::Tunnel);
  PlanResult plan(NodeId t) const;
  const Path& walk_prefix() const { return walk_; }

 private:
  const Domain& d_;
  NodeId s_, g_;
  int m_;
  Heuristic heuristic_;
  bool walk_ok_ = false;
  Path walk_;
};

struct Clustering {
  std::unordered_map<NodeId, int> cluster_of;  // transit node -> cluster id
  std::vector<NodeId> centroids;               // cluster id -> centroid node
  std::vector<std::vector<NodeId>> members;    // cluster id -> sorted members
};

// Seeded k-means-style clustering over the transit candidates; every final
// cluster has >= k members.
Clustering cbp_cluster(const Domain& d, int k, std::uint64_t seed);

class CbpPlanner {
 public:
  CbpPlanner(const Domain& d, NodeId s, NodeId g, int k, int m, std::uint64_t seed,
             Heuristic heuristic = Heuristic::Tunnel);
  const Clustering& clustering() const { return clustering_; }
  PlanResult plan(NodeId t) const;

 private:
  Path cluster_prefix(int cluster) const;

  const Domain& d_;
  NodeId s_, g_;
  int k_, m_;
  std::uint64_t seed_;
  Heuristic heuristic_;
  Clustering clustering_;
  mutable std::unordered_map<int, std::optional<Path>> prefix_cache_;
};

// Existence-construction baseline: one cached path covering every coverable
// candidate, identical for all queries.
class FullCoverPlanner {
 public:
  FullCoverPlanner(const Domain& d, NodeId s, NodeId g, Heuristic heuristic = Heuristic::Tunnel);
  PlanResult plan(NodeId t) const;
  const std::optional<Path>& cover_path() const { return path_; }

 private:
  const Domain& d_;
  NodeId s_, g_;
  std::optional<Path> path_;
  std::vector<bool> coverable_;
};

}  // namespace top
