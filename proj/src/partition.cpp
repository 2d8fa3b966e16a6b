#include "top/partition.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>
#include <stdexcept>

namespace top {

const std::optional<Path>& WrptCache::covering(const std::vector<NodeId>& members,
                                               Deadline deadline) {
  auto it = cache_.find(members);
  if (it != cache_.end()) return it->second;
  WrptResult r = solve_wrpt(d_, s_, g_, members, h_, deadline);
  expansions_ += r.expansions;
  if (r.outcome == WrptOutcome::TimedOut) {
    timed_out_ = true;
    // Not cached: a retry with a fresh budget may still succeed.
    static const std::optional<Path> none;
    return none;
  }
  std::optional<Path> p;
  if (r.solved()) p = std::move(r.path);
  return cache_.emplace(members, std::move(p)).first->second;
}

namespace {

Cost min_pairwise_dispersion(const Domain& d, const std::vector<NodeId>& members) {
  Cost best = kInfCost;
  for (size_t i = 0; i < members.size(); ++i)
    for (size_t j = i + 1; j < members.size(); ++j)
      best = std::min(best, d.dispersion(members[i], members[j]));
  return best;
}

struct SearchContext {
  const Domain& d;
  NodeId s, g;
  PartitionParams params;
  WrptCache cache;
  Deadline deadline;
  std::vector<NodeId> coverable_cands;          // sorted
  std::vector<Cost> singleton_cost_by_node;     // indexed by node id, inf if unknown
  PartitionSearchStats stats;
  std::vector<SearchSubset> best;
  int ap_star = 0;
  Cost mac_star = kInfCost;
  bool aborted = false;
  std::uint64_t order_counter = 0;

  SearchContext(const Domain& dom, NodeId s_, NodeId g_, const PartitionParams& p)
      : d(dom), s(s_), g(g_), params(p), cache(dom, s_, g_, p.heuristic) {
    deadline = p.time_limit_s > 0 ? Deadline::after_seconds(p.time_limit_s)
                                  : Deadline::unlimited();
    singleton_cost_by_node.assign(dom.node_count(), kInfCost);
    stats.directed_no_guarantee = !dom.undirected();
  }

  bool expired() {
    if (!aborted && deadline.expired()) aborted = true;
    return aborted;
  }

  // Per the ac zero-denominator guard: a member with cost(pi^{t*}) = 0
  // contributes 0 when the covering cost is also 0; otherwise the subset is
  // excluded (nullopt).
  std::optional<Cost> subset_ac(const std::vector<NodeId>& members, Cost cover_cost) const {
    Cost total = 0;
    for (NodeId t : members) {
      Cost sc = singleton_cost_by_node[t];
      if (sc == kInfCost) return std::nullopt;
      if (sc == 0) {
        if (cover_cost != 0) return std::nullopt;
        continue;
      }
      total += (cover_cost - sc) / sc;
    }
    return total;
  }

  SearchSubset make_subset(std::vector<NodeId> members) {
    std::sort(members.begin(), members.end());
    SearchSubset s;
    bool before = cache.timed_out();
    const auto& path = cache.covering(members, deadline);
    if (cache.timed_out() && !before) stats.wrpt_timed_out = true;
    s.members = std::move(members);
    if (path) {
      s.cover_cost = path->cost;
      s.ac = subset_ac(s.members, s.cover_cost);
      s.satisfies_3c = (int)s.members.size() >= params.k && s.ac.has_value() &&
                       min_pairwise_dispersion(d, s.members) >= params.ell;
    }
    return s;
  }

  // (ap, mac) of a partition; mac is +inf when nothing is anonymized so the
  // incumbent rule stays well-defined.
  std::pair<int, Cost> score(const std::vector<SearchSubset>& psi) const {
    int ap = 0;
    Cost acc = 0;
    for (const auto& s : psi)
      if (s.satisfies_3c) {
        ap += (int)s.members.size();
        acc += *s.ac;
      }
    return {ap, ap > 0 ? acc / ap : kInfCost};
  }

  // Returns the (ap, mac) of psi after possibly updating the incumbent.
  std::pair<int, Cost> evaluate(const std::vector<SearchSubset>& psi) {
    ++stats.evaluated_partitions;
    auto [ap, mac] = score(psi);
    if (ap > ap_star || (ap == ap_star && mac < mac_star)) {
      ap_star = ap;
      mac_star = mac;
      best = psi;
      stats.incumbent_trace.emplace_back(ap, mac);
    }
    return {ap, mac};
  }

  PartitionResult finish(double elapsed_s) {
    Partition part;
    std::vector<bool> placed(d.node_count(), false);
    for (const auto& s : best) {
      if (!s.satisfies_3c) continue;
      Subset out;
      out.members = s.members;
      out.covering_path = *cache.covering(s.members, Deadline::unlimited());
      out.ac = *s.ac;
      out.satisfies_3c = true;
      for (NodeId t : s.members) placed[t] = true;
      part.subsets.push_back(std::move(out));
      part.ap += (int)s.members.size();
      part.mac += *s.ac;
    }
    part.mac = part.ap > 0 ? part.mac / part.ap : 0;
    for (NodeId t : d.transit())
      if (!placed[t]) part.bucket.push_back(t);
    std::sort(part.bucket.begin(), part.bucket.end());
    stats.best_ap = part.ap;
    stats.best_mac = part.mac;
    stats.completed = !aborted && !stats.wrpt_timed_out;
    stats.elapsed_s = elapsed_s;
    stats.wrpt_expansions = cache.expansions();
    return {std::move(part), stats};
  }

  // Coverable candidates in node-index order; uncoverable ones go straight to
  // the bucket.
  void collect_coverable() {
    coverable_cands = d.transit();
    std::sort(coverable_cands.begin(), coverable_cands.end());
    std::erase_if(coverable_cands, [&](NodeId t) { return !coverable(d, s, g, t); });
    for (NodeId t : coverable_cands) {
      const auto& p = cache.covering({t}, deadline);
      if (cache.timed_out()) stats.wrpt_timed_out = true;
      if (p) singleton_cost_by_node[t] = p->cost;
    }
    std::erase_if(coverable_cands,
                  [&](NodeId t) { return singleton_cost_by_node[t] == kInfCost; });
  }
};

}  // namespace

Check3cResult check_3c(const Domain& d, NodeId s, NodeId g, const std::vector<NodeId>& members,
                       int k, Cost ell, Heuristic heuristic, Deadline deadline) {
  Check3cResult r;
  if ((int)members.size() < k) return r;
  if (min_pairwise_dispersion(d, members) < ell) return r;
  WrptResult w = solve_wrpt(d, s, g, members, heuristic, deadline);
  if (w.outcome == WrptOutcome::TimedOut) {
    r.unknown = true;
    return r;
  }
  if (!w.solved()) return r;
  r.satisfied = true;
  r.covering_path = std::move(w.path);
  return r;
}

bool prunable(const Domain& d, const SearchSubset& a, const SearchSubset& b, Cost ell,
              const IncumbentContext& inc, const std::vector<Cost>& singleton_cost_by_node) {
  if (a.satisfies_3c && b.satisfies_3c) return true;
  for (NodeId x : a.members)
    for (NodeId y : b.members)
      if (d.dispersion(x, y) < ell) return true;
  if (inc.ap_star == inc.total && a.ac && b.ac) {
    Cost mac_term = inc.ap > 0 ? inc.ap * inc.mac : 0;
    Cost ac_hat = inc.ap_star * inc.mac_star - mac_term + *a.ac + *b.ac;
    Cost lb_cost = std::max(a.cover_cost, b.cover_cost);
    Cost ac_bar = 0;
    for (const auto* subset : {&a, &b})
      for (NodeId t : subset->members) {
        Cost sc = singleton_cost_by_node[t];
        if (sc == kInfCost || sc == 0) continue;  // no usable bound term
        ac_bar += (lb_cost - sc) / sc;
      }
    if (ac_bar >= ac_hat) return true;
  }
  return false;
}

std::vector<std::pair<int, int>> merge_order_cost_asc(const std::vector<SearchSubset>& subsets) {
  struct Scored {
    Cost score;
    NodeId min_i, min_j;
    int i, j;
  };
  std::vector<Scored> scored;
  for (int i = 0; i < (int)subsets.size(); ++i)
    for (int j = i + 1; j < (int)subsets.size(); ++j) {
      Cost sc = std::max(subsets[i].cover_cost, subsets[j].cover_cost) *
                (Cost)(subsets[i].members.size() + subsets[j].members.size());
      scored.push_back({sc, subsets[i].members.front(), subsets[j].members.front(), i, j});
    }
  std::sort(scored.begin(), scored.end(), [](const Scored& x, const Scored& y) {
    if (x.score != y.score) return x.score < y.score;
    if (x.min_i != y.min_i) return x.min_i < y.min_i;
    return x.min_j < y.min_j;
  });
  std::vector<std::pair<int, int>> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.emplace_back(s.i, s.j);
  return out;
}

namespace {

void merge_bb_search(SearchContext& ctx, std::vector<SearchSubset>& psi) {
  if (ctx.expired()) return;
  auto [ap, mac] = ctx.evaluate(psi);
  int total = 0;
  for (const auto& s : psi) total += (int)s.members.size();
  if (psi.size() <= 1) return;
  if (ap == total) return;
  if (ctx.ap_star == total && mac >= ctx.mac_star) return;

  std::vector<std::pair<int, int>> pairs;
  if (ctx.params.order == MergeOrderKind::CostAsc) {
    pairs = merge_order_cost_asc(psi);
  } else {
    for (int i = 0; i < (int)psi.size(); ++i)
      for (int j = i + 1; j < (int)psi.size(); ++j) pairs.emplace_back(i, j);
    std::mt19937_64 rng(ctx.params.seed ^ (0x9E3779B97F4A7C15ull * ++ctx.order_counter));
    std::shuffle(pairs.begin(), pairs.end(), rng);
  }

  for (auto [i, j] : pairs) {
    if (ctx.expired()) return;
    IncumbentContext inc{ctx.ap_star, ctx.mac_star, ap, mac, total};
    if (prunable(ctx.d, psi[i], psi[j], ctx.params.ell, inc, ctx.singleton_cost_by_node))
      continue;
    std::vector<NodeId> merged = psi[i].members;
    merged.insert(merged.end(), psi[j].members.begin(), psi[j].members.end());
    SearchSubset ms = ctx.make_subset(std::move(merged));
    if (ms.cover_cost == kInfCost) continue;  // no covering path (or timed out)
    std::vector<SearchSubset> next;
    next.reserve(psi.size() - 1);
    for (int x = 0; x < (int)psi.size(); ++x)
      if (x != i && x != j) next.push_back(psi[x]);
    next.push_back(std::move(ms));
    merge_bb_search(ctx, next);
  }
}

}  // namespace

PartitionResult merge_bb(const Domain& d, NodeId s, NodeId g, const PartitionParams& params) {
  auto t0 = std::chrono::steady_clock::now();
  SearchContext ctx(d, s, g, params);
  ctx.collect_coverable();
  std::vector<SearchSubset> psi;
  for (NodeId t : ctx.coverable_cands) psi.push_back(ctx.make_subset({t}));
  merge_bb_search(ctx, psi);
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return ctx.finish(dt);
}

namespace {

void df_bb_search(SearchContext& ctx, std::vector<std::vector<NodeId>>& groups, size_t next) {
  if (ctx.expired()) return;
  if (next == ctx.coverable_cands.size()) {
    std::vector<SearchSubset> psi;
    psi.reserve(groups.size());
    for (const auto& gset : groups) psi.push_back(ctx.make_subset(gset));
    ctx.evaluate(psi);
    return;
  }
  NodeId n = ctx.coverable_cands[next];
  // Index-based: recursion below appends to (and later shrinks) `groups`,
  // so references into it do not survive the call.
  size_t existing = groups.size();
  for (size_t gi = 0; gi < existing; ++gi) {
    // Prunable(psi, {n}) with a pathless singleton: only the l condition applies.
    bool too_close = false;
    for (NodeId x : groups[gi])
      if (ctx.d.dispersion(x, n) < ctx.params.ell) {
        too_close = true;
        break;
      }
    if (too_close) continue;
    groups[gi].push_back(n);
    df_bb_search(ctx, groups, next + 1);
    groups[gi].pop_back();
  }
  groups.push_back({n});
  df_bb_search(ctx, groups, next + 1);
  groups.pop_back();
}

}  // namespace

PartitionResult df_bb(const Domain& d, NodeId s, NodeId g, const PartitionParams& params) {
  auto t0 = std::chrono::steady_clock::now();
  SearchContext ctx(d, s, g, params);
  ctx.collect_coverable();
  std::vector<std::vector<NodeId>> groups;
  df_bb_search(ctx, groups, 0);
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return ctx.finish(dt);
}

PartitionResult naive_partition(const Domain& d, NodeId s, NodeId g, Cost ell, std::uint64_t seed,
                                Heuristic heuristic) {
  auto t0 = std::chrono::steady_clock::now();
  PartitionParams params;
  params.k = 2;
  params.ell = ell;
  params.heuristic = heuristic;
  params.seed = seed;
  SearchContext ctx(d, s, g, params);
  ctx.collect_coverable();
  std::vector<NodeId> order = ctx.coverable_cands;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<NodeId>> groups;
  for (size_t i = 0; i + 1 < order.size(); i += 2) groups.push_back({order[i], order[i + 1]});
  if (order.size() % 2 == 1) {
    if (groups.empty()) {
      // A lone coverable candidate cannot form a pair; it stays in the bucket.
    } else {
      groups.back().push_back(order.back());
    }
  }
  std::vector<SearchSubset> psi;
  for (const auto& gset : groups) psi.push_back(ctx.make_subset(gset));
  ctx.evaluate(psi);
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return ctx.finish(dt);
}

PartitionResult exhaustive_oracle(const Domain& d, NodeId s, NodeId g, int k, Cost ell,
                                  Heuristic heuristic) {
  auto t0 = std::chrono::steady_clock::now();
  PartitionParams params;
  params.k = k;
  params.ell = ell;
  params.heuristic = heuristic;
  SearchContext ctx(d, s, g, params);
  ctx.collect_coverable();
  size_t n = ctx.coverable_cands.size();
  if (n > 8) throw std::invalid_argument("exhaustive_oracle limited to 8 coverable candidates");
  // Restricted growth strings enumerate every set partition exactly once.
  std::vector<int> rgs(n, 0);
  auto emit = [&]() {
    int blocks = n == 0 ? 0 : *std::max_element(rgs.begin(), rgs.end()) + 1;
    std::vector<std::vector<NodeId>> groups(blocks);
    for (size_t i = 0; i < n; ++i) groups[rgs[i]].push_back(ctx.coverable_cands[i]);
    std::vector<SearchSubset> psi;
    for (const auto& gset : groups) psi.push_back(ctx.make_subset(gset));
    ctx.evaluate(psi);
  };
  if (n == 0) {
    ctx.evaluate({});
  } else {
    while (true) {
      emit();
      int i = (int)n - 1;
      while (i > 0) {
        int maxPrefix = *std::max_element(rgs.begin(), rgs.begin() + i);
        if (rgs[i] <= maxPrefix) break;
        --i;
      }
      if (i == 0) break;
      ++rgs[i];
      std::fill(rgs.begin() + i + 1, rgs.end(), 0);
      // Skip strings that stopped being restricted-growth.
      bool valid = true;
      int running_max = rgs[0];
      for (size_t j = 1; j < n; ++j) {
        if (rgs[j] > running_max + 1) {
          valid = false;
          break;
        }
        running_max = std::max(running_max, rgs[j]);
      }
      if (!valid) break;
    }
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return ctx.finish(dt);
}

std::string serialize_partition(const Partition& p) {
  std::ostringstream out;
  int id = 0;
  for (const auto& sub : p.subsets) {
    out << "subset " << id++ << ":";
    for (NodeId t : sub.members) out << ' ' << t;
    out << " cost=" << (sub.covering_path ? sub.covering_path->cost : kInfCost)
        << " ac=" << sub.ac << "\n";
  }
  out << "bucket:";
  for (NodeId t : p.bucket) out << ' ' << t;
  out << "\n";
  return out.str();
}

}  // namespace top
