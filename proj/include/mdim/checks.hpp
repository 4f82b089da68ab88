#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "clique_tree.hpp"
#include "dp.hpp"
#include "graph.hpp"
#include "instance.hpp"
#include "oracle.hpp"
#include "vectors.hpp"

// Structural and semantic property checks shared by the test suites, the acceptance run and
// the CLI selftest. Each returns how many cases were examined and how many failed.
namespace mdim::checks {

struct Tally {
  long long checked = 0;
  long long violations = 0;
  std::string first;

  void fail(const std::string& what) {
    if (violations++ == 0) first = what;
  }
  void merge(const Tally& o) {
    checked += o.checked;
    if (o.violations && violations == 0) first = o.first;
    violations += o.violations;
  }
  bool ok() const { return violations == 0; }
};

// Every vertex on the far side of a clique separator K (or in K) resolves pairs behind K whose
// distances to K differ by at least two.
inline Tally far_pairs_resolved(const Graph& g, const NiceCliqueTree& t, const DistanceMatrix& d) {
  Tally out;
  const int n = g.size();
  std::set<std::vector<Vertex>> bags;
  for (const auto& nd : t.nodes())
    if (nd.id != t.root()) bags.insert(nd.bag);
  std::vector<int> comp(n);
  for (const auto& K : bags) {
    std::fill(comp.begin(), comp.end(), -1);
    for (Vertex v : K) comp[v] = -2;
    int ncomp = 0;
    for (Vertex s = 0; s < n; ++s) {
      if (comp[s] != -1) continue;
      std::vector<Vertex> q{s};
      comp[s] = ncomp;
      for (std::size_t h = 0; h < q.size(); ++h)
        for (Vertex w : g.neighbors(q[h]))
          if (comp[w] == -1) {
            comp[w] = ncomp;
            q.push_back(w);
          }
      ++ncomp;
    }
    std::vector<int> dk(n);
    for (Vertex x = 0; x < n; ++x) dk[x] = d.dist_to_set(x, K);
    for (int c = 0; c < ncomp; ++c) {
      // G_ext = component c plus K; G_int = the rest
      for (Vertex x1 = 0; x1 < n; ++x1) {
        if (comp[x1] == c || comp[x1] == -2) continue;
        for (Vertex x2 = x1 + 1; x2 < n; ++x2) {
          if (comp[x2] == c || comp[x2] == -2) continue;
          if (std::abs(dk[x1] - dk[x2]) < 2) continue;
          for (Vertex s = 0; s < n; ++s) {
            if (comp[s] != c && comp[s] != -2) continue;
            ++out.checked;
            if (!resolves(s, x1, x2, d))
              out.fail("s=" + std::to_string(s) + " fails on (" + std::to_string(x1) + "," + std::to_string(x2) + ")");
          }
        }
      }
    }
  }
  return out;
}

// Around each node, for pairs of tree components: if S settles all near pairs across the bag,
// it settles every cross pair whose distances to the bag differ by at most one.
inline Tally close_pairs_resolved(const Graph& g, const NiceCliqueTree& t, const DistanceMatrix& d,
                                  std::mt19937_64& rng, int sets_per_node) {
  Tally out;
  const int n = g.size();
  for (const auto& nd : t.nodes()) {
    const auto& X = nd.bag;
    std::vector<char> in_bag(n, 0);
    for (Vertex v : X) in_bag[v] = 1;
    // Vertex sets (minus the bag) of the tree components around the node.
    std::vector<std::vector<Vertex>> parts;
    std::vector<char> below(n, 0);
    for (int c : nd.children) {
      std::vector<Vertex> p;
      for (Vertex v : t.subtree_vertices(c))
        if (!in_bag[v]) p.push_back(v);
      for (Vertex v : p) below[v] = 1;
      parts.push_back(std::move(p));
    }
    std::vector<Vertex> up;
    for (Vertex v = 0; v < n; ++v)
      if (!in_bag[v] && !below[v] &&
          !std::binary_search(t.subtree_vertices(nd.id).begin(), t.subtree_vertices(nd.id).end(), v))
        up.push_back(v);
    parts.push_back(std::move(up));
    std::vector<int> dx(n);
    for (Vertex x = 0; x < n; ++x) dx[x] = d.dist_to_set(x, X);

    for (int q = 0; q < sets_per_node; ++q) {
      std::vector<Vertex> S;
      const unsigned density = 1 + static_cast<unsigned>(q % 4);  // out of 4
      for (Vertex v = 0; v < n; ++v)
        if (rng() % 4 < density) S.push_back(v);
      auto settled = [&](Vertex a, Vertex b) {
        for (Vertex s : S)
          if (d(s, a) != d(s, b)) return true;
        return false;
      };
      for (std::size_t a = 0; a < parts.size(); ++a)
        for (std::size_t b = a + 1; b < parts.size(); ++b) {
          std::vector<Vertex> A = parts[a], B = parts[b];
          A.insert(A.end(), X.begin(), X.end());
          B.insert(B.end(), X.begin(), X.end());
          bool hyp = true;
          for (Vertex u : A) {
            if (dx[u] > 2) continue;
            for (Vertex v : B)
              if (u != v && dx[v] <= 2 && !settled(u, v)) {
                hyp = false;
                break;
              }
            if (!hyp) break;
          }
          if (!hyp) continue;
          for (Vertex u : parts[a])
            for (Vertex v : parts[b]) {
              if (std::abs(dx[u] - dx[v]) > 1) continue;
              ++out.checked;
              if (!settled(u, v))
                out.fail("node " + std::to_string(nd.id) + " pair (" + std::to_string(u) + "," + std::to_string(v) + ")");
            }
        }
    }
  }
  return out;
}

// Coordinate drop at introduce nodes (all binary vectors) and forget nodes (traces whose
// forgotten coordinate is 1) preserves vector resolution of inside pairs.
inline Tally projections_preserved(const NiceCliqueTree& t, const DistanceMatrix& d) {
  Tally out;
  for (const auto& nd : t.nodes()) {
    if (nd.kind != NodeKind::Introduce && nd.kind != NodeKind::Forget) continue;
    const auto& child = t.node(nd.children[0]);
    const auto& big = nd.kind == NodeKind::Introduce ? nd.bag : child.bag;
    const auto& small = nd.kind == NodeKind::Introduce ? child.bag : nd.bag;
    const int k = static_cast<int>(big.size());
    if (k > kMaxDpBag || small.empty()) continue;
    const int p = static_cast<int>(std::find(big.begin(), big.end(), nd.vertex) - big.begin());
    const auto& T = t.subtree_vertices(child.id);
    std::vector<DistVec> vb, vs;
    for (Vertex x : T) {
      vb.push_back(distance_vector(x, big, d));
      vs.push_back(distance_vector(x, small, d));
    }
    for (std::uint32_t code = 0; code < (1u << k); ++code) {
      if (nd.kind == NodeKind::Forget && (!((code >> p) & 1u) || code == all_ones_code(k))) continue;
      const TraceVec r = trace_from_code(code, k);
      const TraceVec rd = drop(r, p);
      for (std::size_t a = 0; a < T.size(); ++a)
        for (std::size_t b = a + 1; b < T.size(); ++b) {
          ++out.checked;
          if (vector_resolves(vb[a], vb[b], r) != vector_resolves(vs[a], vs[b], rd))
            out.fail(std::string(kind_name(nd.kind)) + " node " + std::to_string(nd.id) + " vector " + r.str());
        }
    }
  }
  return out;
}

// A trace vector that resolves two inside distance vectors is matched by every outside vertex
// carrying that trace.
inline Tally trace_soundness(const NiceCliqueTree& t, const DistanceMatrix& d) {
  Tally out;
  for (const auto& nd : t.nodes()) {
    if (static_cast<int>(nd.bag.size()) > kMaxDpBag) continue;
    const auto& T = t.subtree_vertices(nd.id);
    std::vector<char> inside(d.size(), 0);
    for (Vertex x : T) inside[x] = 1;
    for (Vertex s = 0; s < d.size(); ++s) {
      if (inside[s]) continue;
      const auto tr = trace_of(s, nd.bag, d);
      for (std::size_t a = 0; a < T.size(); ++a)
        for (std::size_t b = a + 1; b < T.size(); ++b) {
          const Vertex x = T[a], y = T[b];
          if (!pair_resolved_by_vectors(x, y, nd.bag, std::vector<TraceVec>{tr}, d)) continue;
          ++out.checked;
          if (!resolves(s, x, y, d)) out.fail("node " + std::to_string(nd.id) + " s=" + std::to_string(s));
        }
    }
  }
  return out;
}

// Random valid instance with components drawn from realisable sets.
inline std::optional<EmdInstance> random_instance(const NodeContext& c, std::mt19937_64& rng) {
  EmdInstance I;
  I.node = c.node;
  I.s_mask = static_cast<std::uint32_t>(rng()) & ((1u << c.k) - 1u);
  const unsigned pi = 1 + rng() % 3, pe = 1 + rng() % 3, pp = 1 + rng() % 4;
  for (std::uint32_t x = 0; x < kMaxTraceCodes; ++x) {
    if (((c.inside_traces >> x) & 1u) && rng() % 4 < pi) I.d_int |= TraceSet{1} << x;
    if (((c.outside_traces >> x) & 1u) && rng() % 4 < pe) I.d_ext |= TraceSet{1} << x;
  }
  for (const auto& a : c.inside2)
    for (const auto& b : c.outside2)
      if (rng() % 6 < pp) I.pairs.emplace_back(a, b);
  if (validate_instance(I, c)) return std::nullopt;
  return I;
}

// Every valid realisable instance at a node, when there are at most `limit` of them.
inline std::optional<std::vector<EmdInstance>> all_instances(const NodeContext& c, long long limit) {
  std::vector<std::uint32_t> it, ot;
  for (std::uint32_t x = 0; x < kMaxTraceCodes; ++x) {
    if ((c.inside_traces >> x) & 1u) it.push_back(x);
    if ((c.outside_traces >> x) & 1u) ot.push_back(x);
  }
  std::vector<VecPair> pairs;
  for (const auto& a : c.inside2)
    for (const auto& b : c.outside2) pairs.emplace_back(a, b);
  const long long bits = c.k + static_cast<long long>(it.size() + ot.size() + pairs.size());
  if (bits > 40 || (1LL << bits) > limit) return std::nullopt;
  std::vector<EmdInstance> out;
  for (std::uint32_t s = 0; s < (1u << c.k); ++s)
    for (std::uint32_t a = 0; a < (1u << it.size()); ++a)
      for (std::uint32_t b = 0; b < (1u << ot.size()); ++b) {
        if (s == 0 && b == 0) continue;
        for (std::uint64_t q = 0; q < (std::uint64_t{1} << pairs.size()); ++q) {
          EmdInstance I;
          I.node = c.node;
          I.s_mask = s;
          for (std::size_t i = 0; i < it.size(); ++i)
            if ((a >> i) & 1u) I.d_int |= TraceSet{1} << it[i];
          for (std::size_t i = 0; i < ot.size(); ++i)
            if ((b >> i) & 1u) I.d_ext |= TraceSet{1} << ot[i];
          for (std::size_t i = 0; i < pairs.size(); ++i)
            if ((q >> i) & 1u) I.pairs.push_back(pairs[i]);
          out.push_back(std::move(I));
        }
      }
  return out;
}

struct NodeSemanticsReport {
  Tally memo;        // instances reached by the recursion (extended pair reading)
  Tally exhaustive;  // all valid realisable instances at nodes small enough to enumerate
  Tally sampled;     // random valid realisable instances elsewhere
  int nodes_exhaustive = 0;
  int nodes_sampled = 0;
};

// Compares the recursion against brute-force minimum solutions at every node of one rooted tree.
inline NodeSemanticsReport node_semantics(RootedSolver& solver, const DistanceMatrix& d, std::mt19937_64& rng,
                                          int samples_per_node, long long exhaustive_limit) {
  NodeSemanticsReport rep;
  solver.imd();
  std::vector<std::pair<EmdInstance, Dim>> reached;
  solver.for_each_entry([&](const EmdInstance& I, Dim v) { reached.emplace_back(I, v); });
  for (const auto& [I, v] : reached) {
    ++rep.memo.checked;
    const Dim want = semantic_dim(I, solver.context(I.node), d, PairMode::Extended);
    if (want != v)
      rep.memo.fail("dp=" + std::to_string(v) + " brute=" + std::to_string(want) + " " +
                    describe(I, solver.context(I.node).k));
  }
  for (int node = 0; node < solver.tree().size(); ++node) {
    const auto& c = solver.context(node);
    auto check = [&](const EmdInstance& I, Tally& tally) {
      ++tally.checked;
      const Dim got = solver.dim_of(I);
      const Dim want = semantic_dim(I, c, d, PairMode::Strict);
      if (got != want)
        tally.fail("dp=" + std::to_string(got) + " brute=" + std::to_string(want) + " " + describe(I, c.k));
    };
    if (auto all = all_instances(c, exhaustive_limit)) {
      ++rep.nodes_exhaustive;
      for (const auto& I : *all) check(I, rep.exhaustive);
    } else {
      ++rep.nodes_sampled;
      for (int q = 0; q < samples_per_node; ++q)
        if (auto I = random_instance(c, rng)) check(*I, rep.sampled);
    }
  }
  return rep;
}

// Weakening an instance (fewer required traces and pairs, more external traces) keeps every
// solution a solution, so the value can only drop.
inline Tally dominance(RootedSolver& solver, const DistanceMatrix& d, std::mt19937_64& rng, int pairs_wanted) {
  Tally out;
  const int nodes = solver.tree().size();
  for (int attempt = 0; out.checked < pairs_wanted && attempt < pairs_wanted * 20; ++attempt) {
    const auto& c = solver.context(static_cast<int>(rng() % nodes));
    auto I = random_instance(c, rng);
    if (!I) continue;
    EmdInstance J = *I;
    for (std::uint32_t x = 0; x < kMaxTraceCodes; ++x) {
      if (((J.d_int >> x) & 1u) && rng() % 2) J.d_int &= ~(TraceSet{1} << x);
      if (((c.outside_traces >> x) & 1u) && rng() % 2) J.d_ext |= TraceSet{1} << x;
    }
    std::vector<VecPair> kept;
    for (const auto& pr : J.pairs)
      if (rng() % 2) kept.push_back(pr);
    J.pairs = kept;
    ++out.checked;
    const int m = static_cast<int>(c.inside.size());
    bool transfer = true;
    for (std::uint32_t s = 0; s < (1u << m) && transfer; ++s) {
      std::vector<Vertex> S;
      for (int a = 0; a < m; ++a)
        if ((s >> a) & 1u) S.push_back(c.inside[a]);
      if (is_solution(S, *I, c, d, PairMode::Strict) && !is_solution(S, J, c, d, PairMode::Strict)) transfer = false;
    }
    const Dim a = solver.dim_of(*I), b = solver.dim_of(J);
    if (!transfer || b > a) out.fail("dominance broken: " + describe(*I, c.k) + " vs " + describe(J, c.k));
  }
  return out;
}

// Closed form for trees: 1 for paths, otherwise leaves minus exterior major vertices.
inline int tree_metric_dimension(const Graph& g) {
  const int n = g.size();
  if (n == 1) return 0;
  if (static_cast<int>(g.edges().size()) != n - 1) throw std::invalid_argument("not a tree");
  int leaves = 0, majors_with_legs = 0;
  bool path = true;
  for (Vertex v = 0; v < n; ++v)
    if (g.neighbors(v).size() >= 3) path = false;
  if (path) return 1;
  std::vector<char> exterior(n, 0);
  for (Vertex v = 0; v < n; ++v) {
    if (g.neighbors(v).size() != 1) continue;
    ++leaves;
    Vertex prev = v, cur = g.neighbors(v)[0];
    while (g.neighbors(cur).size() == 2) {
      Vertex nxt = g.neighbors(cur)[0] == prev ? g.neighbors(cur)[1] : g.neighbors(cur)[0];
      prev = cur;
      cur = nxt;
    }
    exterior[cur] = 1;
  }
  for (Vertex v = 0; v < n; ++v) majors_with_legs += exterior[v];
  return leaves - majors_with_legs;
}

}  // namespace mdim::checks
