#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "top/domain.hpp"
#include "top/wrpt.hpp"

namespace top {

// One candidate group. `ac` is the anonymization cost
//   sum over t in members of (cost(pi*_psi) - cost(pi^{t*})) / cost(pi^{t*}).
struct Subset {
  std::vector<NodeId> members;          // sorted transit nodes
  std::optional<Path> covering_path;    // WRPT optimum over members
  Cost ac = 0;
  bool satisfies_3c = false;
};

struct Partition {
  std::vector<Subset> subsets;   // the satisfied groups (Psi+)
  std::vector<NodeId> bucket;    // residual unanonymizable candidates
  int ap = 0;                    // sum of |psi| over Psi+
  Cost mac = 0;                  // sum ac / ap (0 when ap = 0)
};

struct PartitionSearchStats {
  std::int64_t evaluated_partitions = 0;
  int best_ap = 0;
  Cost best_mac = 0;
  bool completed = true;
  bool directed_no_guarantee = false;  // set when the domain is directed
  bool wrpt_timed_out = false;
  double elapsed_s = 0;
  std::int64_t wrpt_expansions = 0;
  // (ap, mac) at each incumbent improvement; used by anytime-monotonicity checks.
  std::vector<std::pair<int, Cost>> incumbent_trace;
};

enum class MergeOrderKind { Random, CostAsc };

struct PartitionParams {
  int k = 2;
  Cost ell = 1;
  MergeOrderKind order = MergeOrderKind::CostAsc;
  Heuristic heuristic = Heuristic::Tunnel;
  std::uint64_t seed = 0;
  double time_limit_s = 0;  // <= 0 means unlimited
};

// Shared WRPT memoization across one partition search (and across planners
// layered on top of it). Keyed by the sorted member set.
class WrptCache {
 public:
  WrptCache(const Domain& d, NodeId s, NodeId g, Heuristic h) : d_(d), s_(s), g_(g), h_(h) {}
  // nullopt = no covering path (or the call timed out; timed_out() reports it).
  const std::optional<Path>& covering(const std::vector<NodeId>& members, Deadline deadline);
  bool timed_out() const { return timed_out_; }
  std::int64_t expansions() const { return expansions_; }
  NodeId start() const { return s_; }
  NodeId goal() const { return g_; }
  const Domain& domain() const { return d_; }
  Heuristic heuristic() const { return h_; }

 private:
  const Domain& d_;
  NodeId s_, g_;
  Heuristic h_;
  bool timed_out_ = false;
  std::int64_t expansions_ = 0;
  std::map<std::vector<NodeId>, std::optional<Path>> cache_;
};

// 3C check for a candidate subset: cardinality >= k, pairwise dispersion
// >= ell, and a covering s->g path exists.
struct Check3cResult {
  bool satisfied = false;
  bool unknown = false;  // WRPT timed out; treated as unsatisfied and flagged
  std::optional<Path> covering_path;
};
Check3cResult check_3c(const Domain& d, NodeId s, NodeId g, const std::vector<NodeId>& members,
                       int k, Cost ell, Heuristic heuristic = Heuristic::Tunnel,
                       Deadline deadline = Deadline::unlimited());

// Branch-and-bound context exposed for the Prunable unit tests.
struct IncumbentContext {
  int ap_star = 0;
  Cost mac_star = kInfCost;
  int ap = 0;        // |ap| of the partition being expanded
  Cost mac = 0;      // its mac (0 when ap = 0)
  int total = 0;     // sum |psi| over the whole current partition
};

struct SearchSubset {
  std::vector<NodeId> members;
  Cost cover_cost = kInfCost;     // cost of the covering path
  std::optional<Cost> ac;         // nullopt when excluded by the zero-cost guard
  bool satisfies_3c = false;
};

bool prunable(const Domain& d, const SearchSubset& a, const SearchSubset& b, Cost ell,
              const IncumbentContext& inc, const std::vector<Cost>& singleton_cost_by_node);

// CostAsc pair ordering: ascending max(cost_i, cost_j) * (|i| + |j|), ties by
// smaller min member index of psi_i, then psi_j.
std::vector<std::pair<int, int>> merge_order_cost_asc(const std::vector<SearchSubset>& subsets);

struct PartitionResult {
  Partition partition;
  PartitionSearchStats stats;
};

PartitionResult merge_bb(const Domain& d, NodeId s, NodeId g, const PartitionParams& params);
PartitionResult df_bb(const Domain& d, NodeId s, NodeId g, const PartitionParams& params);
PartitionResult naive_partition(const Domain& d, NodeId s, NodeId g, Cost ell, std::uint64_t seed,
                                Heuristic heuristic = Heuristic::Tunnel);
// Exhaustive enumeration of all set partitions; |T| <= 8.
PartitionResult exhaustive_oracle(const Domain& d, NodeId s, NodeId g, int k, Cost ell,
                                  Heuristic heuristic = Heuristic::Tunnel);

std::string serialize_partition(const Partition& p);

}  // namespace top
