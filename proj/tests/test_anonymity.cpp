#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>

#include "common.hpp"
#include "top/anonymity.hpp"
#include "top/harness.hpp"

using namespace top;
using testutil::corridor;
using testutil::fixture;
using testutil::make_grid;

namespace {

PartitionParams params_kl(int k, Cost ell) {
  PartitionParams p;
  p.k = k;
  p.ell = ell;
  return p;
}

// Reference subset-existence check by full powerset enumeration.
bool powerset_has_dispersed(const Domain& d, const std::vector<NodeId>& cands, int k, Cost ell) {
  int n = (int)cands.size();
  for (int mask = 0; mask < (1 << n); ++mask) {
    if (std::popcount((unsigned)mask) < k) continue;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = i + 1; j < n && ok; ++j)
        if ((mask >> i & 1) && (mask >> j & 1) && dispersion(d, cands[i], cands[j]) < ell)
          ok = false;
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("full_cover on the pendant corridor is anonymized at k=4") {
  FixtureGraph f = load_fixture_graph(fixture("pendant_corridor.graph"), 1);
  FullCoverPlanner p(f.domain, f.start, f.goal);
  auto plan = [&](NodeId t) { return p.plan(t); };
  for (NodeId t : f.domain.transit()) {
    AnonymityReport rep =
        verify_anonymized_path(f.domain, plan, t, 4, 1, kMInfinity);
    CHECK(rep.anonymized);
    CHECK(rep.equal_prefix.size() == 4);
  }
}

TEST_CASE("k=1 l=0 accepts any non-Failure output") {
  Domain d = corridor(7, {2, 4}, 0);
  auto plan = [&](NodeId t) {
    auto r = solve_wrpt(d, 0, 6, {t});
    return PlanResult{r.path, 0};
  };
  CHECK(verify_anonymized_path(d, plan, 2, 1, 0, kMInfinity).anonymized);
}

TEST_CASE("Failure is never anonymized and groups with nothing") {
  Domain d = corridor(7, {2, 4}, 0);
  auto fail = [&](NodeId) { return PlanResult{}; };
  AnonymityReport rep = verify_anonymized_path(d, fail, 2, 1, 0, kMInfinity);
  CHECK(!rep.anonymized);
  CHECK(rep.equal_prefix.empty());
}

TEST_CASE("pbp on the directed fork anonymizes exactly 3 of 5") {
  FixtureGraph f = load_fixture_graph(fixture("directed_fork.graph"), 0);
  PbpPlanner p(f.domain, f.start, f.goal, PartitionerKind::Exhaustive, params_kl(3, 1));
  auto plan = [&](NodeId t) { return p.plan(t); };
  int granted = 0;
  for (NodeId t : f.domain.transit())
    if (verify_anonymized_path(f.domain, plan, t, 3, 1, kMInfinity).anonymized) ++granted;
  CHECK(granted == 3);
  PlannerOutputs outputs = collect_outputs(f.domain, plan);
  Metrics m = evaluate_outputs(f.domain, f.start, f.goal, outputs, 3, 1, kMInfinity);
  REQUIRE(m.apr);
  CHECK(*m.apr == doctest::Approx(0.6));
}

TEST_CASE("is_anonymizable_tuple") {
  // walled-off t is never anonymizable
  Domain walled = Domain::from_grid(make_grid(5, 3, ".....\n.@@@.\n.@.@.\n"), {}, 0, "probe");
  NodeId pocket = walled.node_at(2, 2);
  NodeId open = walled.node_at(2, 0);
  Domain dw = Domain::from_grid(make_grid(5, 3, ".....\n.@@@.\n.@.@.\n"),
                                {std::min(pocket, open), std::max(pocket, open)}, 0, "walled");
  for (int k = 1; k <= 3; ++k)
    CHECK(!is_anonymizable_tuple(dw, dw.node_at(0, 0), dw.node_at(4, 0), pocket, k, 0, kMInfinity));
  CHECK(is_anonymizable_tuple(dw, dw.node_at(0, 0), dw.node_at(4, 0), open, 1, 0, kMInfinity));

  // 4 candidates pairwise >= 5 apart
  Domain spread = corridor(21, {2, 7, 12, 17}, 0);
  CHECK(is_anonymizable_tuple(spread, 0, 20, 7, 4, 5, kMInfinity));
  CHECK(!is_anonymizable_tuple(spread, 0, 20, 7, 4, 6, kMInfinity));

  // directed domains are undecided
  FixtureGraph f2 = load_fixture_graph(fixture("directed_fork.graph"), 0);
  CHECK_THROWS_AS(
      is_anonymizable_tuple(f2.domain, f2.start, f2.goal, f2.names.at("t1"), 2, 1, kMInfinity),
      std::invalid_argument);
}

TEST_CASE("apr and mac reference planners") {
  Domain d = corridor(9, {2, 6}, 0);
  auto optimal = [&](NodeId t) {
    auto r = solve_wrpt(d, 0, 8, {t});
    return PlanResult{r.path, 0};
  };
  CHECK(mac(d, 0, 8, optimal, 1, 0, kMInfinity) == 0);

  auto fail = [&](NodeId) { return PlanResult{}; };
  CHECK(apr(d, 0, 8, fail, 1, 0, kMInfinity) == 0);
  CHECK(local_anonymity_delta(d, 0, 8, fail, 1, 0, kMInfinity) == 0);
}

TEST_CASE("delta counts anonymized over anonymizable") {
  Domain d = corridor(9, {1, 3, 5, 7}, 0);
  // shared full-corridor path for 1, 3, 5; Failure for 7
  Path corridor_path{{0, 1, 2, 3, 4, 5, 6, 7, 8}, 8};
  auto plan = [&](NodeId t) {
    return t == 7 ? PlanResult{} : PlanResult{corridor_path, 0};
  };
  double delta = local_anonymity_delta(d, 0, 8, plan, 2, 1, kMInfinity);
  CHECK(delta == doctest::Approx(0.75));
}

TEST_CASE("completed pbp achieves delta 1.0 on undirected maps") {
  std::mt19937_64 rng(61);
  int done = 0;
  while (done < 5) {
    GridMap map = testutil::random_grid(rng, 8, 8, 0.2);
    auto inst = testutil::sample_instance(rng, map, 6, 1);
    if (!inst) continue;
    PbpPlanner p(inst->domain, inst->s, inst->g, PartitionerKind::MergeBB, params_kl(2, 1));
    if (!p.stats().completed) continue;
    auto plan = [&](NodeId t) { return p.plan(t); };
    CHECK(local_anonymity_delta(inst->domain, inst->s, inst->g, plan, 2, 1, kMInfinity) == 1.0);
    ++done;
  }
}

TEST_CASE("subset search matches powerset enumeration") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 40; ++trial) {
    GridMap map = testutil::random_grid(rng, 7, 7, 0.2);
    auto inst = testutil::sample_instance(rng, map, 5 + (int)(rng() % 4), 0);
    if (!inst) continue;
    const Domain& d = inst->domain;
    int k = 2 + (int)(rng() % 3);
    Cost ell = 1 + (double)(rng() % 4);
    // a planner that returns one shared path puts every coverable candidate
    // in one equality class, making the verifier's subset search decisive
    FullCoverPlanner p(d, inst->s, inst->g);
    std::vector<NodeId> pool;
    for (NodeId t : d.transit())
      if (!p.plan(t).failed()) pool.push_back(t);
    if (pool.empty()) continue;
    auto plan = [&](NodeId t) { return p.plan(t); };
    bool expected = powerset_has_dispersed(d, pool, k, ell);
    AnonymityReport rep = verify_anonymized_path(d, plan, pool[0], k, ell, kMInfinity);
    CHECK(rep.anonymized == expected);
  }
}

TEST_CASE("verdicts are monotone under parameter relaxation") {
  std::mt19937_64 rng(71);
  int checked = 0;
  while (checked < 100) {
    GridMap map = testutil::random_grid(rng, 8, 8, 0.15);
    auto inst = testutil::sample_instance(rng, map, 6, 1);
    if (!inst) continue;
    const Domain& d = inst->domain;
    RbpPlanner p(d, inst->s, inst->g, 4, rng());
    auto plan = [&](NodeId t) { return p.plan(t); };
    PlannerOutputs outputs = collect_outputs(d, plan);
    std::uniform_int_distribution<int> kp(1, 4), mp(1, 8), lp(0, 3);
    for (int i = 0; i < 10; ++i) {
      int k = kp(rng), m = mp(rng);
      Cost ell = lp(rng);
      NodeId t = d.transit()[rng() % d.transit().size()];
      if (!verify_outputs(d, outputs, t, k, ell, m).anonymized) continue;
      int k2 = 1 + (int)(rng() % k);
      int m2 = 1 + (int)(rng() % m);
      Cost ell2 = ell * 0.5;
      CHECK(verify_outputs(d, outputs, t, k2, ell2, m2).anonymized);
      ++checked;
    }
  }
}

TEST_CASE("verdicts survive a fixed wrapping detour") {
  Domain d = corridor(9, {2, 6}, 0);
  PbpPlanner p(d, 1, 7, PartitionerKind::MergeBB, params_kl(2, 1));
  auto plan = [&](NodeId t) { return p.plan(t); };
  // same outputs with a t-independent detour 1,0,1 glued in front
  auto wrapped = [&](NodeId t) -> PlanResult {
    PlanResult r = p.plan(t);
    if (r.failed()) return r;
    Path head{{1, 0, 1}, 2};
    return PlanResult{concat(d, head, *r.path), r.group_id};
  };
  for (NodeId t : d.transit()) {
    bool base = verify_anonymized_path(d, plan, t, 2, 1, kMInfinity).anonymized;
    bool wrap = verify_anonymized_path(d, wrapped, t, 2, 1, kMInfinity).anonymized;
    CHECK(base == wrap);
  }
}
