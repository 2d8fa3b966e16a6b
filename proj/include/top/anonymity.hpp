#pragma once

#include <optional>
#include <vector>

#include "top/planners.hpp"

namespace top {

// Planner outputs for every transit candidate, aligned with candidate order
// (sorted node index). The verifiers are pure functions over this table.
struct PlannerOutputs {
  std::vector<NodeId> candidates;              // sorted transit nodes
  std::vector<std::optional<Path>> paths;      // nullopt = Failure
};

PlannerOutputs collect_outputs(const Domain& d, const PlanFn& planner);

struct AnonymityReport {
  NodeId t = -1;
  std::vector<NodeId> equal_prefix;  // E: candidates whose m-prefix matches t's
  int best_k = 0;                    // largest l-dispersed subset found (search stops at k)
  Cost achieved_ell = 0;             // min pairwise dispersion of that subset
  bool anonymized = false;
};

// Definition-level check of a (k, l, m)-Anonymized Path from recorded
// outputs. Failure outputs group with nothing. Exact subset search.
AnonymityReport verify_outputs(const Domain& d, const PlannerOutputs& outputs, NodeId t, int k,
                               Cost ell, int m);

// Convenience wrapper that runs the planner for every candidate first.
AnonymityReport verify_anonymized_path(const Domain& d, const PlanFn& planner, NodeId t, int k,
                                       Cost ell, int m);

// 3C-based decision for input tuples. Undirected domains only; throws
// std::invalid_argument on directed input (the question is undecided there).
bool is_anonymizable_tuple(const Domain& d, NodeId s, NodeId g, NodeId t, int k, Cost ell, int m);

struct Metrics {
  int coverable = 0;
  int anonymized = 0;
  int anonymizable = -1;          // -1 when not computed (directed domain)
  std::optional<double> apr;      // empty when no candidate is coverable
  std::optional<double> mac;      // empty when nothing is anonymized
  std::optional<double> delta;    // anonymized / anonymizable
  bool delta_vacuous = false;     // denominator was 0; delta = 1 by convention
  bool mac_term_excluded = false; // zero-cost guard dropped a term
};

Metrics evaluate_outputs(const Domain& d, NodeId s, NodeId g, const PlannerOutputs& outputs,
                         int k, Cost ell, int m, Heuristic heuristic = Heuristic::Tunnel);

double apr(const Domain& d, NodeId s, NodeId g, const PlanFn& planner, int k, Cost ell, int m);
double mac(const Domain& d, NodeId s, NodeId g, const PlanFn& planner, int k, Cost ell, int m);
double local_anonymity_delta(const Domain& d, NodeId s, NodeId g, const PlanFn& planner, int k,
                             Cost ell, int m);

}  // namespace top
