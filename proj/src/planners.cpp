#include "top/planners.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace top {

namespace {

// FNV-1a over the instance identifiers. Planner randomness must derive from
// (instance, user seed) and never from t; every seeded walk goes through here.
std::uint64_t instance_seed(const std::string& domain_name,
                            std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  for (unsigned char c : domain_name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  for (std::uint64_t v : parts) feed(v);
  return h;
}

// Minimum-cost completion from `from` to g covering t unless the already
// walked part covers it.
std::optional<Path> covering_completion(const Domain& d, const Path& walked, NodeId g, NodeId t,
                                        Heuristic heuristic) {
  std::vector<NodeId> targets;
  if (!covers(d, walked, t)) targets.push_back(t);
  WrptResult r = solve_wrpt(d, walked.back(), g, targets, heuristic);
  if (!r.solved()) return std::nullopt;
  return concat(d, walked, r.path);
}

}  // namespace

PartitionResult run_partitioner(const Domain& d, NodeId s, NodeId g, PartitionerKind kind,
                                const PartitionParams& params) {
  switch (kind) {
    case PartitionerKind::MergeBB:
      return merge_bb(d, s, g, params);
    case PartitionerKind::DfBB:
      return df_bb(d, s, g, params);
    case PartitionerKind::Naive:
      return naive_partition(d, s, g, params.ell, params.seed, params.heuristic);
    case PartitionerKind::Exhaustive:
      return exhaustive_oracle(d, s, g, params.k, params.ell, params.heuristic);
  }
  throw std::logic_error("unknown partitioner kind");
}

PbpPlanner::PbpPlanner(const Domain& d, NodeId s, NodeId g, PartitionerKind kind,
                       const PartitionParams& params)
    : d_(d), s_(s), g_(g), heuristic_(params.heuristic),
      result_(run_partitioner(d, s, g, kind, params)) {
  for (int i = 0; i < (int)result_.partition.subsets.size(); ++i)
    for (NodeId t : result_.partition.subsets[i].members) subset_of_[t] = i;
}

PlanResult PbpPlanner::plan(NodeId t) const {
  auto it = subset_of_.find(t);
  if (it == subset_of_.end()) return {};  // bucket -> Failure
  PlanResult r;
  r.path = *result_.partition.subsets[it->second].covering_path;
  r.group_id = it->second;
  return r;
}

PlanResult PbpPlanner::plan_bounded(NodeId t, int m) const {
  PlanResult base = plan(t);
  if (base.failed()) return base;
  if (m >= base.path->length()) return base;
  Path pre = prefix(d_, *base.path, m);
  auto full = covering_completion(d_, pre, g_, t, heuristic_);
  if (!full) return {};
  PlanResult r;
  r.path = std::move(*full);
  r.group_id = base.group_id;
  return r;
}

RbpPlanner::RbpPlanner(const Domain& d, NodeId s, NodeId g, int m, std::uint64_t seed,
                       Heuristic heuristic)
    : d_(d), s_(s), g_(g), m_(m), heuristic_(heuristic) {
  if (m == kMInfinity) throw std::invalid_argument("Rbp requires finite m");
  if (m < 1) throw std::invalid_argument("m must be positive");
  std::mt19937_64 rng(instance_seed(d.name(), {(std::uint64_t)s, (std::uint64_t)g,
                                               (std::uint64_t)m, seed}));
  walk_.nodes.push_back(s);
  walk_ok_ = true;
  while (walk_.length() < m_) {
    const auto& nb = d_.neighbors(walk_.back());
    if (nb.empty()) {
      walk_ok_ = false;
      break;
    }
    std::uniform_int_distribution<size_t> pick(0, nb.size() - 1);
    const Edge& e = nb[pick(rng)];
    walk_.nodes.push_back(e.to);
    walk_.cost += e.cost;
  }
}

PlanResult RbpPlanner::plan(NodeId t) const {
  if (!walk_ok_) return {};
  auto full = covering_completion(d_, walk_, g_, t, heuristic_);
  if (!full) return {};
  PlanResult r;
  r.path = std::move(*full);
  r.group_id = 0;  // one global prefix group
  return r;
}

namespace {

// Centroid of a member set: argmin over all nodes of the max cost to cover
// any member, ties to the smaller node index. `reach` maps candidate ->
// cost-to-cover field.
NodeId centroid_of(const Domain& d, const std::vector<NodeId>& members,
                   const std::unordered_map<NodeId, std::vector<Cost>>& reach) {
  NodeId best = 0;
  Cost best_val = kInfCost;
  bool first = true;
  for (NodeId n = 0; n < d.node_count(); ++n) {
    Cost worst = 0;
    for (NodeId u : members) worst = std::max(worst, reach.at(u)[n]);
    if (first || worst < best_val) {
      best = n;
      best_val = worst;
      first = false;
    }
  }
  return best;
}

}  // namespace

Clustering cbp_cluster(const Domain& d, int k, std::uint64_t seed) {
  std::vector<NodeId> cands = d.transit();
  std::sort(cands.begin(), cands.end());
  if ((int)cands.size() < k)
    throw std::invalid_argument("Cbp clustering needs |T| >= k");
  std::unordered_map<NodeId, std::vector<Cost>> reach;
  for (NodeId t : cands) reach.emplace(t, cost_to_reach_any(d, d.visible_by(t)));

  int n_clusters = (int)cands.size() / k;
  std::vector<NodeId> shuffled = cands;
  std::mt19937_64 rng(seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::vector<std::vector<NodeId>> clusters(n_clusters);
  for (size_t i = 0; i < shuffled.size(); ++i) clusters[i % n_clusters].push_back(shuffled[i]);
  for (auto& c : clusters) std::sort(c.begin(), c.end());

  std::vector<NodeId> centroids;
  for (int iter = 0; iter < 100; ++iter) {
    centroids.clear();
    for (const auto& c : clusters) centroids.push_back(centroid_of(d, c, reach));
    std::vector<std::vector<NodeId>> next(clusters.size());
    std::unordered_map<NodeId, Cost> assigned_d;
    for (NodeId t : cands) {
      int best = 0;
      Cost best_d = kInfCost;
      for (int c = 0; c < (int)centroids.size(); ++c) {
        Cost dist = reach.at(t)[centroids[c]];
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      next[best].push_back(t);
      assigned_d[t] = best_d;
    }
    // Coinciding centroids drain clusters through the first-index tie rule.
    // Reseed an emptied cluster with the worst-served candidate so the
    // cluster count survives and symmetry breaks.
    for (auto& empty : next) {
      if (!empty.empty()) continue;
      NodeId worst = -1;
      for (auto& donor : next) {
        if (donor.size() < 2) continue;
        for (NodeId t : donor)
          if (worst == -1 || assigned_d[t] > assigned_d[worst] ||
              (assigned_d[t] == assigned_d[worst] && t < worst))
            worst = t;
      }
      if (worst == -1) break;
      for (auto& donor : next) std::erase(donor, worst);
      empty.push_back(worst);
      assigned_d[worst] = -1;  // not a donor candidate again this round
    }
    std::erase_if(next, [](const auto& c) { return c.empty(); });
    for (auto& c : next) std::sort(c.begin(), c.end());
    if (next == clusters) break;
    clusters = std::move(next);
  }

  // Fold sub-k clusters into their nearest cluster (centroid-to-centroid).
  while (clusters.size() > 1) {
    centroids.clear();
    for (const auto& c : clusters) centroids.push_back(centroid_of(d, c, reach));
    int small = -1;
    for (int c = 0; c < (int)clusters.size(); ++c)
      if ((int)clusters[c].size() < k) {
        small = c;
        break;
      }
    if (small == -1) break;
    int nearest = -1;
    Cost nd = kInfCost;
    for (int c = 0; c < (int)clusters.size(); ++c) {
      if (c == small) continue;
      Cost dist = d.dist(centroids[small], centroids[c]);
      if (nearest == -1 || dist < nd) {
        nd = dist;
        nearest = c;
      }
    }
    auto members = std::move(clusters[small]);
    clusters.erase(clusters.begin() + small);
    if (nearest > small) --nearest;
    clusters[nearest].insert(clusters[nearest].end(), members.begin(), members.end());
    std::sort(clusters[nearest].begin(), clusters[nearest].end());
  }

  Clustering out;
  out.members = clusters;
  for (const auto& c : clusters) out.centroids.push_back(centroid_of(d, c, reach));
  for (int c = 0; c < (int)clusters.size(); ++c)
    for (NodeId t : clusters[c]) out.cluster_of[t] = c;
  return out;
}

CbpPlanner::CbpPlanner(const Domain& d, NodeId s, NodeId g, int k, int m, std::uint64_t seed,
                       Heuristic heuristic)
    : d_(d), s_(s), g_(g), k_(k), m_(m), seed_(seed), heuristic_(heuristic),
      clustering_(cbp_cluster(d, k, seed)) {
  if (m == kMInfinity) throw std::invalid_argument("Cbp requires finite m");
  if (m < 1) throw std::invalid_argument("m must be positive");
}

Path CbpPlanner::cluster_prefix(int cluster) const {
  NodeId sigma = clustering_.centroids[cluster];
  auto to_sigma = d_.shortest_path(s_, sigma);
  if (!to_sigma) throw std::runtime_error("centroid unreachable from start");
  if (to_sigma->length() >= m_) return prefix(d_, *to_sigma, m_);
  // Pad with a seeded random walk until walk + remaining route reaches m.
  std::mt19937_64 rng(instance_seed(d_.name(), {(std::uint64_t)s_, (std::uint64_t)g_,
                                                (std::uint64_t)m_, (std::uint64_t)cluster,
                                                seed_}));
  Path walk;
  walk.nodes.push_back(s_);
  auto rest = *to_sigma;
  // Pad until the concatenation (junction shared) reaches m nodes, so the
  // first m output nodes are cluster-determined.
  while (walk.length() + rest.length() - 1 < m_) {
    const auto& nb = d_.neighbors(walk.back());
    if (nb.empty()) break;
    std::uniform_int_distribution<size_t> pick(0, nb.size() - 1);
    const Edge& e = nb[pick(rng)];
    walk.nodes.push_back(e.to);
    walk.cost += e.cost;
    auto r = d_.shortest_path(walk.back(), sigma);
    if (!r) throw std::runtime_error("centroid unreachable from walk node");
    rest = *r;
  }
  return concat(d_, walk, rest);
}

PlanResult CbpPlanner::plan(NodeId t) const {
  auto it = clustering_.cluster_of.find(t);
  if (it == clustering_.cluster_of.end()) return {};
  int cluster = it->second;
  auto cached = prefix_cache_.find(cluster);
  if (cached == prefix_cache_.end()) {
    std::optional<Path> p;
    try {
      p = cluster_prefix(cluster);
    } catch (const std::runtime_error&) {
      p = std::nullopt;
    }
    cached = prefix_cache_.emplace(cluster, std::move(p)).first;
  }
  if (!cached->second) return {};
  auto full = covering_completion(d_, *cached->second, g_, t, heuristic_);
  if (!full) return {};
  PlanResult r;
  r.path = std::move(*full);
  r.group_id = cluster;
  return r;
}

FullCoverPlanner::FullCoverPlanner(const Domain& d, NodeId s, NodeId g, Heuristic heuristic)
    : d_(d), s_(s), g_(g), coverable_(d.node_count(), false) {
  std::vector<NodeId> cands = d.transit();
  std::sort(cands.begin(), cands.end());
  std::erase_if(cands, [&](NodeId t) { return !coverable(d, s, g, t); });
  for (NodeId t : cands) coverable_[t] = true;
  if (cands.empty()) return;
  // Splice per-candidate covering paths with g -> s return segments; path
  // extension preserves each segment's coverage.
  std::optional<Path> total;
  auto back_home = d.shortest_path(g, s);
  for (NodeId t : cands) {
    WrptResult r = solve_wrpt(d, s, g, {t}, heuristic);
    if (!r.solved()) return;  // leaves path_ empty; every query then fails
    if (!total) {
      total = r.path;
    } else {
      if (!back_home) return;
      total = concat(d_, *total, *back_home);
      total = concat(d_, *total, r.path);
    }
  }
  path_ = std::move(total);
}

PlanResult FullCoverPlanner::plan(NodeId t) const {
  if (t < 0 || t >= (int)coverable_.size() || !coverable_[t] || !path_) return {};
  PlanResult r;
  r.path = *path_;
  r.group_id = 0;
  return r;
}

}  // namespace top
