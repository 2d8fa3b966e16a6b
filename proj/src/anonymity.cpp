#include "top/anonymity.hpp"

#include <algorithm>
#include <stdexcept>

namespace top {

namespace {

// Largest pairwise-l-dispersed subset of `nodes`, searched exactly but cut
// off once `stop_at` is reached (a greedy check can wrongly reject, so the
// search is branch-and-bound on the l-far graph).
struct DispersedSearch {
  const Domain& d;
  Cost ell;
  int stop_at;
  const std::vector<NodeId>& nodes;
  std::vector<std::vector<bool>> far;
  std::vector<int> best;     // indices into nodes
  std::vector<int> current;

  DispersedSearch(const Domain& d_, Cost ell_, int stop_at_, const std::vector<NodeId>& ns)
      : d(d_), ell(ell_), stop_at(stop_at_), nodes(ns) {
    size_t n = nodes.size();
    far.assign(n, std::vector<bool>(n, false));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j)
        far[i][j] = far[j][i] = d.dispersion(nodes[i], nodes[j]) >= ell;
  }

  void recurse(size_t from) {
    if ((int)current.size() > (int)best.size()) best = current;
    if ((int)best.size() >= stop_at) return;
    if ((int)(current.size() + (nodes.size() - from)) <= (int)best.size()) return;
    for (size_t i = from; i < nodes.size(); ++i) {
      bool ok = true;
      for (int c : current)
        if (!far[c][i]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      current.push_back((int)i);
      recurse(i + 1);
      current.pop_back();
      if ((int)best.size() >= stop_at) return;
    }
  }

  std::vector<NodeId> run() {
    recurse(0);
    std::vector<NodeId> out;
    for (int i : best) out.push_back(nodes[i]);
    return out;
  }
};

std::vector<NodeId> prefix_nodes(const Path& p, int m) {
  if (m >= p.length()) return p.nodes;
  return std::vector<NodeId>(p.nodes.begin(), p.nodes.begin() + m);
}

}  // namespace

PlannerOutputs collect_outputs(const Domain& d, const PlanFn& planner) {
  PlannerOutputs out;
  out.candidates = d.transit();
  std::sort(out.candidates.begin(), out.candidates.end());
  for (NodeId t : out.candidates) {
    PlanResult r = planner(t);
    out.paths.push_back(r.failed() ? std::nullopt : std::move(r.path));
  }
  return out;
}

AnonymityReport verify_outputs(const Domain& d, const PlannerOutputs& outputs, NodeId t, int k,
                               Cost ell, int m) {
  AnonymityReport rep;
  rep.t = t;
  auto it = std::find(outputs.candidates.begin(), outputs.candidates.end(), t);
  if (it == outputs.candidates.end()) throw std::invalid_argument("t is not a transit candidate");
  size_t ti = it - outputs.candidates.begin();
  if (!outputs.paths[ti]) return rep;  // Failure: verdict not-anonymized, empty E
  auto want = prefix_nodes(*outputs.paths[ti], m);
  for (size_t i = 0; i < outputs.candidates.size(); ++i) {
    // Failure != Failure: failed outputs never join the equal-prefix set.
    if (!outputs.paths[i]) continue;
    if (prefix_nodes(*outputs.paths[i], m) == want)
      rep.equal_prefix.push_back(outputs.candidates[i]);
  }
  DispersedSearch search(d, ell, k, rep.equal_prefix);
  auto subset = search.run();
  rep.best_k = (int)subset.size();
  rep.achieved_ell = kInfCost;
  for (size_t i = 0; i < subset.size(); ++i)
    for (size_t j = i + 1; j < subset.size(); ++j)
      rep.achieved_ell = std::min(rep.achieved_ell, d.dispersion(subset[i], subset[j]));
  rep.anonymized = rep.best_k >= k;
  return rep;
}

AnonymityReport verify_anonymized_path(const Domain& d, const PlanFn& planner, NodeId t, int k,
                                       Cost ell, int m) {
  return verify_outputs(d, collect_outputs(d, planner), t, k, ell, m);
}

bool is_anonymizable_tuple(const Domain& d, NodeId s, NodeId g, NodeId t, int k, Cost ell,
                           int m) {
  if (!d.undirected())
    throw std::invalid_argument("is_anonymizable_tuple is undecided for directed domains");
  (void)m;  // on undirected domains the m-bounded and infinite cases coincide
  if (t == s || t == g) return false;
  if (!coverable(d, s, g, t)) return false;
  std::vector<NodeId> cands = d.transit();
  std::sort(cands.begin(), cands.end());
  std::erase_if(cands, [&](NodeId c) { return !coverable(d, s, g, c); });
  DispersedSearch search(d, ell, k, cands);
  return (int)search.run().size() >= k;
}

Metrics evaluate_outputs(const Domain& d, NodeId s, NodeId g, const PlannerOutputs& outputs,
                         int k, Cost ell, int m, Heuristic heuristic) {
  Metrics mx;
  std::vector<bool> is_anon(outputs.candidates.size(), false);
  for (size_t i = 0; i < outputs.candidates.size(); ++i) {
    if (coverable(d, s, g, outputs.candidates[i])) ++mx.coverable;
    if (!outputs.paths[i]) continue;
    auto rep = verify_outputs(d, outputs, outputs.candidates[i], k, ell, m);
    if (rep.anonymized) {
      is_anon[i] = true;
      ++mx.anonymized;
    }
  }
  if (mx.coverable > 0) mx.apr = (double)mx.anonymized / mx.coverable;

  double acc = 0;
  int terms = 0;
  for (size_t i = 0; i < outputs.candidates.size(); ++i) {
    if (!is_anon[i]) continue;
    WrptResult best = solve_wrpt(d, s, g, {outputs.candidates[i]}, heuristic);
    if (!best.solved()) continue;
    Cost sc = best.path.cost;
    Cost pc = outputs.paths[i]->cost;
    if (sc == 0) {
      if (pc == 0) {
        ++terms;  // contributes 0
      } else {
        mx.mac_term_excluded = true;
      }
      continue;
    }
    acc += (pc - sc) / sc;
    ++terms;
  }
  if (terms > 0) mx.mac = acc / terms;

  if (d.undirected()) {
    mx.anonymizable = 0;
    for (NodeId t : outputs.candidates)
      if (t != s && t != g && is_anonymizable_tuple(d, s, g, t, k, ell, m)) ++mx.anonymizable;
    if (mx.anonymizable == 0) {
      mx.delta = 1.0;  // vacuous satisfaction
      mx.delta_vacuous = true;
    } else {
      mx.delta = (double)mx.anonymized / mx.anonymizable;
    }
  }
  return mx;
}

double apr(const Domain& d, NodeId s, NodeId g, const PlanFn& planner, int k, Cost ell, int m) {
  auto mx = evaluate_outputs(d, s, g, collect_outputs(d, planner), k, ell, m);
  if (!mx.apr) throw std::domain_error("APR undefined: no coverable transit candidate");
  return *mx.apr;
}

double mac(const Domain& d, NodeId s, NodeId g, const PlanFn& planner, int k, Cost ell, int m) {
  auto mx = evaluate_outputs(d, s, g, collect_outputs(d, planner), k, ell, m);
  if (!mx.mac) throw std::domain_error("MAC undefined: nothing anonymized");
  return *mx.mac;
}

double local_anonymity_delta(const Domain& d, NodeId s, NodeId g, const PlanFn& planner, int k,
                             Cost ell, int m) {
  auto mx = evaluate_outputs(d, s, g, collect_outputs(d, planner), k, ell, m);
  if (!mx.delta) throw std::domain_error("delta undefined on directed domains");
  return *mx.delta;
}

}  // namespace top
