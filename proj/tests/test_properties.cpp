#include <gtest/gtest.h>

#include <random>

#include "mdim/checks.hpp"
#include "mdim/dp.hpp"
#include "mdim/oracle.hpp"
#include "test_support.hpp"

using namespace mdim;
using namespace mdim::testing;

namespace {

void expect_clean(const checks::Tally& t, long long min_checked) {
  EXPECT_EQ(t.violations, 0) << t.first;
  EXPECT_GE(t.checked, min_checked);
}

}  // namespace

TEST(SeparatorProperties, FarPairsResolvedFromOutside) {
  checks::Tally all;
  for (const auto& g : corpus(20, 5, 30, 5, 2024)) {
    auto d = all_pairs_distances(g);
    all.merge(checks::far_pairs_resolved(g, build_nice_clique_tree(g, 0), d));
  }
  expect_clean(all, 1000);
}

TEST(SeparatorProperties, ClosePairsFollowFromNearPairs) {
  std::mt19937_64 rng(17);
  checks::Tally all;
  for (const auto& g : corpus(20, 3, 10, 3, 31)) {
    auto d = all_pairs_distances(g);
    all.merge(checks::close_pairs_resolved(g, build_nice_clique_tree(g, g.size() / 2), d, rng, 8));
  }
  expect_clean(all, 1000);
}

TEST(SeparatorProperties, TraceSoundness) {
  checks::Tally all;
  for (const auto& g : corpus(20, 3, 20, 5, 64)) {
    auto d = all_pairs_distances(g);
    all.merge(checks::trace_soundness(build_nice_clique_tree(g, 1 % g.size()), d));
  }
  expect_clean(all, 1000);
}

TEST(Projections, DropPreservesResolution) {
  checks::Tally all;
  for (const auto& g : corpus(20, 3, 12, 5, 808)) {
    auto d = all_pairs_distances(g);
    for (Vertex r = 0; r < g.size(); r += 2) all.merge(checks::projections_preserved(build_nice_clique_tree(g, r), d));
  }
  expect_clean(all, 10000);
}

// At forget nodes the all-ones vector over the child bag is not a trace; dropping its
// 1-coordinate can change which pairs it resolves, which is why the check skips it.
TEST(Projections, ForgetRestrictionIsNeeded) {
  // forget vertex 0 of P3 from the bag {0,1}
  Graph g = path_graph(3);
  auto d = all_pairs_distances(g);
  const std::vector<Vertex> big{0, 1}, small{1};
  const TraceVec ones{1, 1};
  EXPECT_FALSE(vector_resolves(distance_vector(1, big, d), distance_vector(0, big, d), ones));
  EXPECT_TRUE(vector_resolves(distance_vector(1, small, d), distance_vector(0, small, d), drop(ones, 0)));
}

TEST(NodeSemantics, RecursionMatchesBruteForce) {
  std::mt19937_64 rng(5);
  checks::NodeSemanticsReport total;
  for (const auto& g : corpus(12, 2, 7, 3, 4242)) {
    auto d = all_pairs_distances(g);
    RootedSolver s(g, d, static_cast<Vertex>(rng() % g.size()));
    auto rep = checks::node_semantics(s, d, rng, 30, 1 << 12);
    total.memo.merge(rep.memo);
    total.exhaustive.merge(rep.exhaustive);
    total.sampled.merge(rep.sampled);
  }
  expect_clean(total.memo, 100);
  expect_clean(total.exhaustive, 1000);
  EXPECT_EQ(total.sampled.violations, 0) << total.sampled.first;
}

TEST(NodeSemantics, DominanceMonotone) {
  std::mt19937_64 rng(6);
  checks::Tally all;
  for (const auto& g : corpus(10, 3, 8, 3, 99)) {
    auto d = all_pairs_distances(g);
    RootedSolver s(g, d, 0);
    all.merge(checks::dominance(s, d, rng, 100));
  }
  expect_clean(all, 900);
}

TEST(ResolvingSets, SupersetsResolve) {
  std::mt19937_64 rng(12);
  for (const auto& g : corpus(20, 2, 15, 4, 6)) {
    auto d = all_pairs_distances(g);
    auto base = metric_dimension(g).witness;
    for (int q = 0; q < 10; ++q) {
      auto sup = base;
      for (Vertex v = 0; v < g.size(); ++v)
        if (rng() % 3 == 0 && !std::binary_search(base.begin(), base.end(), v)) sup.push_back(v);
      EXPECT_TRUE(is_resolving_set(sup, d));
    }
  }
}

// Random trees against the closed form for trees, which is independent of both solvers.
TEST(Trees, MatchClosedForm) {
  for (int n = 2; n <= 40; n += 2)
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      Graph g = random_chordal(n, 2, 1000 * n + seed);
      EXPECT_EQ(metric_dimension(g).dim, checks::tree_metric_dimension(g)) << format_graph(g);
    }
  EXPECT_EQ(checks::tree_metric_dimension(path_graph(6)), 1);
  EXPECT_EQ(checks::tree_metric_dimension(star_graph(5)), 4);
  EXPECT_EQ(checks::tree_metric_dimension(Graph(1, {})), 0);
}

TEST(Trees, ClosedFormMatchesOracle) {
  for (int n = 2; n <= 12; ++n)
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      Graph g = random_chordal(n, 2, 77 * n + seed);
      EXPECT_EQ(checks::tree_metric_dimension(g), min_resolving_set(g).size) << format_graph(g);
    }
}

TEST(Determinism, RepeatedRunsAgree) {
  for (const auto& g : corpus(8, 5, 20, 4, 321)) {
    auto a = metric_dimension(g), b = metric_dimension(g, {}, 3);
    EXPECT_EQ(a.dim, b.dim);
    EXPECT_EQ(a.witness, b.witness);
    ASSERT_EQ(a.runs.size(), b.runs.size());
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
      EXPECT_EQ(a.runs[i].value, b.runs[i].value);
      EXPECT_EQ(a.runs[i].memo_entries, b.runs[i].memo_entries);
    }
  }
}
