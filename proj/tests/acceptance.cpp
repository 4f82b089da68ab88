// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mdim/checks.hpp"
#include "mdim/mdim.hpp"

using namespace mdim;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string tally_text(const char* name, const checks::Tally& t) {
  return std::string(name) + "_checked=" + std::to_string(t.checked) + " " + name +
         "_violations=" + std::to_string(t.violations) + (t.ok() ? "" : " first=\"" + t.first + "\"");
}

Graph path_graph(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, e);
}

Graph complete_graph(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, e);
}

Graph star_graph(int m) {
  std::vector<Edge> e;
  for (int i = 1; i <= m; ++i) e.emplace_back(0, i);
  return Graph(m + 1, e);
}

// A1: end-to-end equivalence on 200 graphs, n in [2,10], omega <= 3.
Outcome a1() {
  const auto t0 = Clock::now();
  int mismatches = 0, budget = 0, unverified = 0;
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + i % 9, omega = 2 + (i / 9) % 2;
    Graph g = random_chordal(n, omega, 10'000 + i);
    try {
      auto res = metric_dimension(g);
      if (res.dim != min_resolving_set(g).size) ++mismatches;
      if (!res.witness_verified) ++unverified;
    } catch (const BudgetExceeded&) {
      ++budget;
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && budget == 0 && unverified == 0 && secs <= 1800.0,
          "graphs=200 mismatches=" + std::to_string(mismatches) + " budget_exceeded=" + std::to_string(budget) +
              " unverified_witnesses=" + std::to_string(unverified) + " runtime_s=" + std::to_string(secs)};
}

// A2: rooted value equals the oracle minimum containing the root, every root of 50 graphs.
Outcome a2() {
  int checked = 0, mismatches = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = 2 + i % 7, omega = 2 + i % 2;
    Graph g = random_chordal(n, omega, 20'000 + i);
    for (Vertex r = 0; r < n; ++r) {
      ++checked;
      if (imd(g, r) != min_resolving_set(g, r).size) ++mismatches;
    }
  }
  return {mismatches == 0, "graphs=50 roots=" + std::to_string(checked) + " mismatches=" + std::to_string(mismatches)};
}

// A3: nice-tree guarantees on 100 graphs, n <= 200, omega <= 6, five roots each.
Outcome a3() {
  int trees = 0, violations = 0;
  double worst_ratio = 0;
  std::string first;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + (i * 37) % 199, omega = 2 + i % 5;
    Graph g = random_chordal(n, omega, 30'000 + i);
    std::vector<Vertex> roots{0, n - 1, n / 2, static_cast<Vertex>(rng() % n), static_cast<Vertex>(rng() % n)};
    for (Vertex r : roots) {
      auto t = build_nice_clique_tree(g, r);
      ++trees;
      worst_ratio = std::max(worst_ratio, static_cast<double>(t.size()) / n);
      if (auto err = validate_nice_tree(g, t, r)) {
        if (violations++ == 0) first = *err;
      }
    }
  }
  char ratio[32];
  std::snprintf(ratio, sizeof ratio, "%.3f", worst_ratio);
  return {violations == 0, "graphs=100 trees=" + std::to_string(trees) + " violations=" + std::to_string(violations) +
                               " worst_nodes_per_vertex=" + ratio + (first.empty() ? "" : " first=\"" + first + "\"")};
}

// A4: far pairs behind a clique separator, 100 graphs with n <= 40.
Outcome a4() {
  checks::Tally t;
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + (i * 13) % 39, omega = 2 + i % 5;
    Graph g = random_chordal(n, omega, 40'000 + i);
    auto d = all_pairs_distances(g);
    for (Vertex r : {0, n - 1}) t.merge(checks::far_pairs_resolved(g, build_nice_clique_tree(g, r), d));
  }
  return {t.ok() && t.checked > 0, "graphs=100 " + tally_text("pairs", t)};
}

// A5: coordinate drop at introduce and forget nodes, every root of graphs with n <= 12.
Outcome a5() {
  checks::Tally t;
  for (int i = 0; i < 60; ++i) {
    const int n = 2 + i % 11, omega = 2 + i % 5;
    Graph g = random_chordal(n, omega, 50'000 + i);
    auto d = all_pairs_distances(g);
    for (Vertex r = 0; r < n; ++r) t.merge(checks::projections_preserved(build_nice_clique_tree(g, r), d));
  }
  return {t.ok() && t.checked > 0, "graphs=60 " + tally_text("cases", t)};
}

// A6: per-node semantics and dominance on graphs with n <= 8, omega <= 3, every root.
Outcome a6() {
  std::mt19937_64 rng(6);
  checks::NodeSemanticsReport total;
  checks::Tally dom;
  int graphs = 0, runs = 0;
  for (int i = 0; i < 40; ++i) {
    const int n = 2 + i % 7, omega = 2 + (i / 7) % 2;
    Graph g = random_chordal(n, omega, 60'000 + i);
    auto d = all_pairs_distances(g);
    ++graphs;
    for (Vertex r = 0; r < n; ++r) {
      RootedSolver s(g, d, r);
      auto rep = checks::node_semantics(s, d, rng, 200, 1 << 14);
      total.memo.merge(rep.memo);
      total.exhaustive.merge(rep.exhaustive);
      total.sampled.merge(rep.sampled);
      total.nodes_exhaustive += rep.nodes_exhaustive;
      total.nodes_sampled += rep.nodes_sampled;
      dom.merge(checks::dominance(s, d, rng, 60));
      ++runs;
    }
  }
  const bool pass = total.memo.ok() && total.exhaustive.ok() && total.sampled.ok() && dom.ok() && dom.checked >= 10'000;
  return {pass, "graphs=" + std::to_string(graphs) + " rooted_runs=" + std::to_string(runs) +
                    " nodes_exhaustive=" + std::to_string(total.nodes_exhaustive) +
                    " nodes_sampled=" + std::to_string(total.nodes_sampled) + " " + tally_text("memo", total.memo) + " " +
                    tally_text("exhaustive", total.exhaustive) + " " + tally_text("sampled", total.sampled) + " " +
                    tally_text("dominance", dom)};
}

// A7: known families; the oracle values are checked against the closed forms before the DP.
Outcome a7() {
  int cases = 0, oracle_bad = 0, dp_bad = 0;
  auto check = [&](const Graph& g, int expected) {
    ++cases;
    if (min_resolving_set(g).size != expected) {
      ++oracle_bad;
      return;
    }
    if (metric_dimension(g).dim != expected) ++dp_bad;
  };
  for (int n = 2; n <= 10; ++n) check(path_graph(n), 1);
  for (int n = 2; n <= 7; ++n) check(complete_graph(n), n - 1);
  for (int m = 2; m <= 6; ++m) check(star_graph(m), m - 1);
  return {oracle_bad == 0 && dp_bad == 0, "cases=" + std::to_string(cases) + " oracle_mismatches=" +
                                              std::to_string(oracle_bad) + " dp_mismatches=" + std::to_string(dp_bad)};
}

// A8: random trees with n = 50 finish under the memo budget; timings are reported, and the
// values are compared with the closed form for trees.
Outcome a8() {
  const auto t0 = Clock::now();
  PhaseTimes sum;
  int trees = 0, formula_bad = 0, budget = 0;
  std::size_t memo_max = 0;
  for (int i = 0; i < 5; ++i) {
    Graph g = random_chordal(50, 2, 80'000 + i);
    ++trees;
    try {
      auto res = metric_dimension(g);
      for (const auto& run : res.runs) {
        sum.tree_ms += run.times.tree_ms;
        sum.context_ms += run.times.context_ms;
        sum.solve_ms += run.times.solve_ms;
        sum.witness_ms += run.times.witness_ms;
        memo_max = std::max(memo_max, run.memo_entries);
      }
      if (res.dim != checks::tree_metric_dimension(g) || !res.witness_verified) ++formula_bad;
    } catch (const BudgetExceeded&) {
      ++budget;
    }
  }
  const double secs = seconds_since(t0);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "trees=%d n=50 budget_exceeded=%d formula_mismatches=%d memo_max=%zu tree_ms=%.1f context_ms=%.1f "
                "solve_ms=%.1f witness_ms=%.1f runtime_s=%.2f",
                trees, budget, formula_bad, memo_max, sum.tree_ms, sum.context_ms, sum.solve_ms, sum.witness_ms, secs);
  return {budget == 0 && formula_bad == 0 && secs <= 600.0, buf};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"A1 end-to-end equivalence", a1}, {"A2 rooted equivalence", a2},   {"A3 nice-tree guarantees", a3},
      {"A4 far-pair separator suite", a4}, {"A5 projection suites", a5}, {"A6 per-node semantics", a6},
      {"A7 known families", a7},           {"A8 tree smoke benchmark", a8}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
