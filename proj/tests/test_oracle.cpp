#include <atomic>
#include <catch2/catch_amalgamated.hpp>

#include "hyperenum/oracle.hpp"
#include "support/naive.hpp"

using namespace hyperenum;

namespace {

ForbiddenSet one_edge(int n, int r, Edge e) { return ForbiddenSet(Hypergraph(n, r, {e})); }

const DegreeSequence k1_6(std::vector<int>(6, 1));
const DegreeSequence k1_9(std::vector<int>(9, 1));
const DegreeSequence k2_6(std::vector<int>(6, 2));

}  // namespace

TEST_CASE("count_avoiding on the matching class") {
  CHECK(oracle::count_class(k1_6, 3).count == 10);
  CHECK(oracle::count_avoiding(k1_6, 3, one_edge(6, 3, Edge({0, 1, 2}))).count == 9);

  // forbidding every triple through vertex 0 kills every matching
  std::vector<Edge> through0;
  const Hypergraph complete6 = Hypergraph::complete(6, 3);
  for (const Edge& e : complete6.edges())
    if (e.contains(0)) through0.push_back(e);
  REQUIRE(through0.size() == 10);
  CHECK(oracle::count_avoiding(k1_6, 3, ForbiddenSet(Hypergraph(6, 3, through0))).count == 0);
}

TEST_CASE("infeasible inputs come back as structured zero") {
  auto res = oracle::count_class(DegreeSequence({1, 1, 1, 1, 1}), 3);
  CHECK(res.count == 0);
  REQUIRE(res.infeasible_reason);

  res = oracle::count_class(DegreeSequence({2, 2, 1}), 5);
  CHECK(res.count == 0);
  REQUIRE(res.infeasible_reason);

  // M = 0 is the empty hypergraph, not an infeasibility
  CHECK(oracle::count_class(DegreeSequence({0, 0, 0}), 3).count == 1);
}

TEST_CASE("count_containing and duality") {
  CHECK(oracle::count_containing(k1_6, 3, one_edge(6, 3, Edge({0, 1, 2}))).count == 1);
  CHECK(oracle::count_containing(k1_6, 3, ForbiddenSet::none(6, 3)).count == 10);
  // x0 = 2 > k0 = 1
  ForbiddenSet too_much(Hypergraph(6, 3, {Edge({0, 1, 2}), Edge({0, 3, 4})}));
  CHECK(oracle::count_containing(k1_6, 3, too_much).count == 0);
  CHECK(oracle::count_containing_direct(k1_6, 3, too_much).count == 0);
}

TEST_CASE("duality identity on randomized instances") {
  naive::InstanceGen gen(501);
  int checked = 0;
  while (checked < 30) {
    const int n = gen.uniform(4, 7);
    DegreeSequence k = gen.degrees(n, 3, 3);
    ForbiddenSet x = gen.forbidden_within(k, 3, 2);
    const auto direct = oracle::count_containing_direct(k, 3, x);
    const auto via = oracle::count_containing(k, 3, x);
    CHECK(direct.count == via.count);
    ++checked;
  }
}

TEST_CASE("memoized and plain enumeration agree with the naive oracle") {
  naive::InstanceGen gen(733);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = gen.uniform(3, 7);
    DegreeSequence k = gen.degrees(n, 3, 3);
    ForbiddenSet x = gen.forbidden_within(k, 3, 2);
    const BigInt reference = naive::count_avoiding(k, 3, x);
    oracle::Options plain;
    plain.memoize = false;
    CHECK(oracle::count_avoiding(k, 3, x).count == reference);
    CHECK(oracle::count_avoiding(k, 3, x, plain).count == reference);
  }
}

TEST_CASE("count is independent of worker count") {
  oracle::Options two;
  two.threads = 2;
  oracle::Options three;
  three.threads = 3;
  three.memoize = false;
  const auto base = oracle::count_class(k2_6, 3);
  CHECK(base.count == 75);
  CHECK(oracle::count_class(k2_6, 3, two).count == 75);
  CHECK(oracle::count_class(k2_6, 3, three).count == 75);

  std::atomic<int> seen{0};
  oracle::Visitor visit = [&](const Hypergraph&) { seen.fetch_add(1); };
  oracle::enumerate_avoiding(k2_6, 3, ForbiddenSet::none(6, 3), visit, two);
  CHECK(seen.load() == 75);
}

TEST_CASE("monotonicity under growing forbidden sets") {
  naive::InstanceGen gen(92);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = gen.uniform(4, 7);
    DegreeSequence k = gen.degrees(n, 3, 2);
    ForbiddenSet large = gen.forbidden_within(k, 3, 3);
    if (large.t() == 0) continue;
    std::vector<Edge> fewer(large.edges().begin(), large.edges().end() - 1);
    ForbiddenSet small(Hypergraph(n, 3, fewer));
    CHECK(oracle::count_avoiding(k, 3, large).count <= oracle::count_avoiding(k, 3, small).count);
  }
}

TEST_CASE("relabeling symmetry") {
  naive::InstanceGen gen(61);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = gen.uniform(4, 7);
    DegreeSequence k = gen.degrees(n, 3, 2);
    ForbiddenSet x = gen.forbidden_within(k, 3, 2);

    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) perm[static_cast<std::size_t>(v)] = v;
    shuffle(perm, gen.rng);

    std::vector<int> pk(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) pk[static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])] = k[v];
    std::vector<Edge> pedges;
    for (const Edge& e : x.edges()) {
      std::vector<int> verts;
      for (int v : e.vertices()) verts.push_back(perm[static_cast<std::size_t>(v)]);
      pedges.emplace_back(verts);
    }
    CHECK(oracle::count_avoiding(DegreeSequence(pk), 3, ForbiddenSet(Hypergraph(n, 3, pedges))).count ==
          oracle::count_avoiding(k, 3, x).count);
  }
}

TEST_CASE("xi_exact") {
  CHECK(oracle::xi_exact(k1_6, 3, Edge({0, 1, 2})) == BigRat(1, 9));
  CHECK(oracle::xi_exact(k1_9, 3, Edge({0, 1, 2})) == BigRat(1, 27));
  // a vertex of degree zero makes containment impossible
  CHECK(oracle::xi_exact(DegreeSequence({0, 1, 1, 1, 1, 1, 1}), 3, Edge({0, 1, 2})) == 0);
  // n = r = 3: the unique hypergraph contains the unique edge
  CHECK_THROWS_AS(oracle::xi_exact(DegreeSequence({1, 1, 1}), 3, Edge({0, 1, 2})),
                  DegenerateDenominator);
}

TEST_CASE("prob_avoid_exact") {
  CHECK(oracle::prob_avoid_exact(k1_6, 3, one_edge(6, 3, Edge({0, 1, 2}))) == BigRat(9, 10));
  CHECK(oracle::prob_avoid_exact(k1_6, 3, ForbiddenSet::none(6, 3)) == 1);
  CHECK(oracle::prob_avoid_exact(k1_9, 3, one_edge(9, 3, Edge({0, 1, 2}))) == BigRat(27, 28));
  CHECK_THROWS_AS(oracle::prob_avoid_exact(DegreeSequence({2, 2, 2}), 3, ForbiddenSet::none(3, 3)),
                  EmptyClass);
}

TEST_CASE("sandwich bound from the xi sum") {
  naive::InstanceGen gen(1234);
  int applicable = 0;
  for (int trial = 0; trial < 60 && applicable < 12; ++trial) {
    const int n = gen.uniform(5, 7);
    DegreeSequence k = gen.degrees(n, 3, 2);
    ForbiddenSet x = gen.forbidden_within(k, 3, 2);
    if (x.t() == 0) continue;
    if (oracle::count_class(k, 3).count == 0) continue;
    BigRat xi_sum = 0;
    bool degenerate = false;
    for (const Edge& e : x.edges()) {
      try {
        xi_sum += oracle::xi_exact(k, 3, e);
      } catch (const DegenerateDenominator&) {
        degenerate = true;
      }
    }
    if (degenerate || xi_sum > 1) continue;
    const BigRat p = oracle::prob_avoid_exact(k, 3, x);
    CHECK(p <= 1);
    CHECK(p >= 1 - xi_sum);
    ++applicable;
  }
  CHECK(applicable > 0);
}

TEST_CASE("perfect matching counts") {
  CHECK(oracle::count_perfect_matchings(Hypergraph::complete(6, 3)) == 10);
  CHECK(oracle::count_perfect_matchings(Hypergraph(6, 3, {Edge({0, 1, 2}), Edge({3, 4, 5})})) == 1);
  CHECK(oracle::count_perfect_matchings(Hypergraph::complete(9, 3)) == 280);
  // r does not divide n
  CHECK(oracle::count_perfect_matchings(Hypergraph::complete(7, 3)) == 0);
  // isolated vertex can never be covered
  CHECK(oracle::count_perfect_matchings(Hypergraph(6, 3, {Edge({0, 1, 2})})) == 0);
}

TEST_CASE("pm_complete matches enumeration") {
  CHECK(oracle::pm_complete(6, 3) == 10);
  CHECK(oracle::pm_complete(9, 3) == 280);
  CHECK(oracle::pm_complete(3, 3) == 1);
  CHECK(oracle::pm_complete(12, 3) == 15400);
  CHECK(oracle::pm_complete(8, 4) == 35);
  CHECK_THROWS_AS(oracle::pm_complete(7, 3), NonDivisible);
  for (int n = 3; n <= 9; n += 3)
    CHECK(oracle::pm_complete(n, 3) == oracle::count_perfect_matchings(Hypergraph::complete(n, 3)));
  CHECK(oracle::pm_complete(8, 4) == oracle::count_perfect_matchings(Hypergraph::complete(8, 4)));
}

TEST_CASE("loose hamilton counts") {
  CHECK(oracle::count_loose_hamilton(Hypergraph::complete(6, 3)) == 120);
  CHECK(oracle::count_loose_hamilton(Hypergraph(6, 3, {Edge({0, 1, 2}), Edge({3, 4, 5})})) == 0);

  Hypergraph one_cycle(6, 3, {Edge({0, 1, 2}), Edge({2, 3, 4}), Edge({4, 5, 0})});
  CHECK(oracle::count_loose_hamilton(one_cycle) == 1);
  CHECK(naive::count_loose_hamilton(one_cycle) == 1);

  CHECK(oracle::count_loose_hamilton(Hypergraph::complete(8, 3)) == 5040);
  CHECK_THROWS_AS(oracle::count_loose_hamilton(Hypergraph::complete(4, 3)), DegenerateCycle);
  // (r-1) does not divide n: no cycle can exist
  CHECK(oracle::count_loose_hamilton(Hypergraph::complete(7, 3)) == 0);
}

TEST_CASE("loose hamilton agrees with the permutation oracle on random members") {
  naive::InstanceGen gen(77);
  for (int trial = 0; trial < 12; ++trial) {
    DegreeSequence k = gen.degrees(6, 3, 3);
    std::vector<Hypergraph> all;
    naive::count_avoiding(k, 3, ForbiddenSet::none(6, 3), &all);
    for (std::size_t i = 0; i < all.size() && i < 5; ++i)
      CHECK(oracle::count_loose_hamilton(all[i]) == naive::count_loose_hamilton(all[i]));
  }
}

TEST_CASE("hc_complete") {
  CHECK(oracle::hc_complete(6, 3) == 120);
  CHECK(oracle::hc_complete(8, 3) == 5040);
  CHECK_THROWS_AS(oracle::hc_complete(7, 3), NonDivisible);
  CHECK_THROWS_AS(oracle::hc_complete(4, 3), DegenerateCycle);
  CHECK(oracle::hc_complete(8, 3) == oracle::count_loose_hamilton(Hypergraph::complete(8, 3)));
  CHECK(oracle::hc_complete(9, 4) == 7560);
  CHECK(oracle::hc_complete(9, 4) == oracle::count_loose_hamilton(Hypergraph::complete(9, 4)));
}

TEST_CASE("expectation_exact") {
  CHECK(oracle::expectation_exact(k1_6, 3, oracle::Structure::PerfectMatching) == 1);
  CHECK(oracle::expectation_exact(k1_9, 3, oracle::Structure::PerfectMatching) == 1);
  CHECK(oracle::expectation_exact(k1_6, 3, oracle::Structure::LooseHamilton) == 0);

  const BigRat ez = oracle::expectation_exact(k2_6, 3, oracle::Structure::PerfectMatching);
  CHECK(ez == BigRat(6, 5));
  CHECK(oracle::expectation_via_containment(k2_6, 3, oracle::Structure::PerfectMatching) == ez);

  const BigRat ey = oracle::expectation_exact(k2_6, 3, oracle::Structure::LooseHamilton);
  CHECK(ey == BigRat(8, 5));
  CHECK(oracle::expectation_via_containment(k2_6, 3, oracle::Structure::LooseHamilton) == ey);
}

TEST_CASE("node budget guard") {
  oracle::Options tiny;
  tiny.node_budget = 3;
  CHECK_THROWS_AS(oracle::count_class(DegreeSequence(std::vector<int>(9, 2)), 3, tiny),
                  InstanceTooLarge);
}

TEST_CASE("visitor sees canonical hypergraphs in canonical order") {
  std::vector<Hypergraph> seen;
  oracle::Visitor visit = [&](const Hypergraph& h) { seen.push_back(h); };
  oracle::enumerate_avoiding(k1_6, 3, ForbiddenSet::none(6, 3), visit);
  REQUIRE(seen.size() == 10);
  for (const auto& h : seen) {
    CHECK(degree_sequence_of(h) == k1_6);
    CHECK(std::is_sorted(h.edges().begin(), h.edges().end()));
  }
  CHECK(std::is_sorted(seen.begin(), seen.end()));
}
