#pragma once

#include <algorithm>
#include <climits>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clique_tree.hpp"
#include "graph.hpp"
#include "vectors.hpp"

namespace mdim {

// Extended dimension values; kInfDim saturates.
using Dim = int;
inline constexpr Dim kInfDim = INT_MAX / 4;
inline Dim dim_add(Dim a, Dim b) { return (a >= kInfDim || b >= kInfDim) ? kInfDim : a + b; }

// Everything about one tree node that the recurrences read: the bag, the split of V into
// T(X_i) and the rest, and the distance vectors and traces realised on each side.
struct NodeContext {
  int node = -1;
  std::vector<Vertex> bag;
  int k = 0;
  std::vector<Vertex> inside;
  std::vector<Vertex> outside;
  std::vector<char> is_inside;
  std::vector<DistVec> dv;  // per vertex of G, over the bag

  std::vector<DistVec> inside_vecs;  // distinct, sorted
  std::vector<int> vec_id;           // inside vertex -> index into inside_vecs, -1 outside
  std::vector<DistVec> inside2;         // distinct inside vectors with min <= 2 (sorted)
  std::vector<DistVec> inside2_nonbag;  // those realised by a vertex outside the bag (sorted)
  std::vector<DistVec> outside2;        // distinct outside vectors with min <= 2 (sorted)
  TraceSet inside_traces = 0;
  TraceSet nonbag_traces = 0;
  TraceSet outside_traces = 0;
  std::vector<std::uint32_t> bag_trace;  // trace code of each bag vertex

  // res[c]: bitset over unordered pairs of distinct inside vectors resolved by trace code c.
  int words = 0;
  std::vector<std::vector<std::uint64_t>> res;

  bool has_inside2(const DistVec& r) const { return std::binary_search(inside2.begin(), inside2.end(), r); }
  bool has_inside2_nonbag(const DistVec& r) const {
    return std::binary_search(inside2_nonbag.begin(), inside2_nonbag.end(), r);
  }
  bool has_outside2(const DistVec& r) const { return std::binary_search(outside2.begin(), outside2.end(), r); }

  // Traces of the bag vertices selected by s_mask.
  TraceSet free_set(std::uint32_t s_mask) const {
    TraceSet f = 0;
    for (int j = 0; j < k; ++j)
      if ((s_mask >> j) & 1u) f |= TraceSet{1} << bag_trace[j];
    return f;
  }
};

inline void sort_unique(std::vector<DistVec>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

inline NodeContext node_context(const NiceCliqueTree& t, int node, const DistanceMatrix& d, bool with_res = true) {
  NodeContext c;
  c.node = node;
  c.bag = t.node(node).bag;
  c.k = static_cast<int>(c.bag.size());
  const int n = d.size();
  c.is_inside.assign(n, 0);
  for (Vertex v : t.subtree_vertices(node)) c.is_inside[v] = 1;
  std::vector<char> in_bag(n, 0);
  for (Vertex v : c.bag) in_bag[v] = 1;
  c.dv.resize(n);
  for (Vertex x = 0; x < n; ++x) {
    c.dv[x] = distance_vector(x, c.bag, d);
    const DistVec& r = c.dv[x];
    const bool small = c.k <= kMaxDpBag;
    if (c.is_inside[x]) {
      c.inside.push_back(x);
      c.inside_vecs.push_back(r);
      if (r.min() <= 2) {
        c.inside2.push_back(r);
        if (!in_bag[x]) c.inside2_nonbag.push_back(r);
      }
      if (small) {
        auto code = trace_code(trace_from_distvec(r));
        c.inside_traces |= TraceSet{1} << code;
        if (!in_bag[x]) c.nonbag_traces |= TraceSet{1} << code;
      }
    } else {
      c.outside.push_back(x);
      if (r.min() <= 2) c.outside2.push_back(r);
      if (small) c.outside_traces |= TraceSet{1} << trace_code(trace_from_distvec(r));
    }
  }
  sort_unique(c.inside_vecs);
  sort_unique(c.inside2);
  sort_unique(c.inside2_nonbag);
  sort_unique(c.outside2);
  c.vec_id.assign(n, -1);
  for (Vertex x : c.inside)
    c.vec_id[x] = static_cast<int>(std::lower_bound(c.inside_vecs.begin(), c.inside_vecs.end(), c.dv[x]) -
                                   c.inside_vecs.begin());
  for (int j = 0; j < c.k; ++j) {
    std::uint32_t code = all_ones_code(c.k) & ~(1u << j);
    c.bag_trace.push_back(code);
  }

  if (with_res && c.k <= kMaxDpBag) {
    const int m = static_cast<int>(c.inside_vecs.size());
    const long long bits = static_cast<long long>(m) * m;
    c.words = static_cast<int>((bits + 63) / 64);
    const std::uint32_t codes = 1u << c.k;
    c.res.assign(codes, std::vector<std::uint64_t>(c.words, 0));
    for (std::uint32_t code = 0; code < codes; ++code) {
      if (code == all_ones_code(c.k)) continue;
      const TraceVec u = trace_from_code(code, c.k);
      std::vector<int> val(m);
      for (int a = 0; a < m; ++a) {
        int best = INT_MAX;
        for (int l = 0; l < c.k; ++l) best = std::min(best, c.inside_vecs[a][l] + u[l]);
        val[a] = best;
      }
      for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
          if (val[a] != val[b]) {
            long long bit = static_cast<long long>(a) * m + b;
            c.res[code][bit >> 6] |= std::uint64_t{1} << (bit & 63);
          }
    }
  }
  return c;
}

// An instance of the extended problem at one node. S_I and the trace sets are bitmasks over
// bag positions and trace codes respectively.
struct EmdInstance {
  int node = -1;
  std::uint32_t s_mask = 0;
  TraceSet d_int = 0;
  TraceSet d_ext = 0;
  std::vector<VecPair> pairs;

  friend bool operator==(const EmdInstance&, const EmdInstance&) = default;
};

inline std::string describe(const EmdInstance& I, int k) {
  std::string s = "node=" + std::to_string(I.node) + " S={";
  bool first = true;
  for (int j = 0; j < k; ++j)
    if ((I.s_mask >> j) & 1u) {
      s += (first ? "" : ",") + std::to_string(j);
      first = false;
    }
  auto set = [&](TraceSet ts) {
    std::string o = "{";
    bool f = true;
    for (const auto& t : traces_of_set(ts, k)) {
      o += (f ? "" : ",") + t.str();
      f = false;
    }
    return o + "}";
  };
  s += "} int=" + set(I.d_int) + " ext=" + set(I.d_ext) + " pairs={";
  for (std::size_t i = 0; i < I.pairs.size(); ++i)
    s += (i ? "," : "") + std::string("[") + I.pairs[i].first.str() + I.pairs[i].second.str() + "]";
  return s + "}";
}

inline std::uint32_t s_mask_of(const std::vector<Vertex>& bag, const std::vector<Vertex>& set) {
  std::uint32_t m = 0;
  for (std::size_t j = 0; j < bag.size(); ++j)
    if (std::find(set.begin(), set.end(), bag[j]) != set.end()) m |= 1u << j;
  return m;
}

// Pair semantics. Strict: the original reading, where (r,t) constrains only real outside
// vertices y with distance vector t and d(y,X) <= 2. Extended: t stands for a virtual outside
// vertex whose distance to s is min_l(d(s,v_l) + t_l); for real y this is d(s,y), so both agree
// whenever t is realised, and the extended form is what the recurrences need internally.
enum class PairMode { Strict, Extended };

inline int virtual_distance(const DistVec& s_vec, const DistVec& t) {
  int best = INT_MAX;
  for (int l = 0; l < t.size(); ++l) best = std::min(best, s_vec[l] + t[l]);
  return best;
}

inline std::optional<std::string> validate_instance(const EmdInstance& I, const NodeContext& ctx,
                                                    PairMode mode = PairMode::Strict) {
  const int k = ctx.k;
  if (k > kMaxDpBag) return "bag larger than " + std::to_string(kMaxDpBag);
  if (I.s_mask >> k) return "S_I outside the bag";
  const TraceSet valid =
      ((1u << k) == kMaxTraceCodes ? ~TraceSet{0} : (TraceSet{1} << (1u << k)) - 1) & ~(TraceSet{1} << all_ones_code(k));
  if (I.d_int & ~valid) return "D_int holds a non-trace vector";
  if (I.d_ext & ~valid) return "D_ext holds a non-trace vector";
  if (I.d_ext == 0 && I.s_mask == 0) return "D_ext and S_I both empty";
  for (const auto& [r, t] : I.pairs) {
    if (r.size() != k || t.size() != k) return "pair of wrong length";
    if (mode == PairMode::Strict) {
      if (r.max() > 3 || t.max() > 3) return "pair entry above 3";
      if (!ctx.has_inside2(r)) return "pair " + r.str() + t.str() + " has no inside witness";
      if (!ctx.has_outside2(t)) return "pair " + r.str() + t.str() + " has no outside witness";
    } else if (!ctx.has_inside2(r)) {
      return "pair " + r.str() + t.str() + " has no inside witness";
    }
  }
  return std::nullopt;
}

// Each condition of a solution, phrased as "S must hit this vertex set"; the bag part of S is fixed.
struct SolutionClauses {
  bool impossible = false;
  std::uint32_t fixed_in = 0;       // bag part of S, as a mask over ctx.inside positions
  std::uint32_t fixed_out = 0;      // bag vertices excluded from S
  std::vector<std::uint32_t> hit;   // masks over ctx.inside positions
};

// Requires |T(X_i)| <= 32.
inline SolutionClauses solution_clauses(const EmdInstance& I, const NodeContext& ctx, const DistanceMatrix& d,
                                        PairMode mode = PairMode::Extended) {
  SolutionClauses cl;
  const int m = static_cast<int>(ctx.inside.size());
  if (m > 32) throw std::invalid_argument("solution clauses need |T(X_i)| <= 32");
  const int k = ctx.k;
  for (int a = 0; a < m; ++a) {
    Vertex x = ctx.inside[a];
    auto it = std::find(ctx.bag.begin(), ctx.bag.end(), x);
    if (it == ctx.bag.end()) continue;
    int j = static_cast<int>(it - ctx.bag.begin());
    if ((I.s_mask >> j) & 1u)
      cl.fixed_in |= 1u << a;
    else
      cl.fixed_out |= 1u << a;
  }
  std::vector<TraceVec> ext = traces_of_set(I.d_ext, k);
  std::vector<std::uint32_t> codes(m);
  for (int a = 0; a < m; ++a) codes[a] = trace_code(trace_from_distvec(ctx.dv[ctx.inside[a]]));

  auto add = [&](std::uint32_t mask) {
    if (mask == 0) cl.impossible = true;
    cl.hit.push_back(mask);
  };
  // inside pairs are resolved
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      Vertex x = ctx.inside[a], y = ctx.inside[b];
      bool by_ext = false;
      for (const auto& u : ext)
        if (vector_resolves(ctx.dv[x], ctx.dv[y], u)) {
          by_ext = true;
          break;
        }
      if (by_ext) continue;
      std::uint32_t mask = 0;
      for (int s = 0; s < m; ++s)
        if (d(ctx.inside[s], x) != d(ctx.inside[s], y)) mask |= 1u << s;
      add(mask);
    }
  // demanded traces are realised
  for (std::uint32_t c = 0; c < kMaxTraceCodes; ++c)
    if ((I.d_int >> c) & 1u) {
      std::uint32_t mask = 0;
      for (int s = 0; s < m; ++s)
        if (codes[s] == c) mask |= 1u << s;
      add(mask);
    }
  // listed pairs are resolved by S itself
  for (const auto& [r, t] : I.pairs) {
    if (mode == PairMode::Strict) {
      for (int a = 0; a < m; ++a) {
        Vertex x = ctx.inside[a];
        if (ctx.dv[x] != r || r.min() > 2) continue;
        for (Vertex y : ctx.outside) {
          if (ctx.dv[y] != t || t.min() > 2) continue;
          std::uint32_t mask = 0;
          for (int s = 0; s < m; ++s)
            if (d(ctx.inside[s], x) != d(ctx.inside[s], y)) mask |= 1u << s;
          add(mask);
        }
      }
    } else {
      if (r.min() > 2) continue;
      for (int a = 0; a < m; ++a) {
        Vertex x = ctx.inside[a];
        if (ctx.dv[x] != r) continue;
        std::uint32_t mask = 0;
        for (int s = 0; s < m; ++s) {
          Vertex sv = ctx.inside[s];
          if (d(sv, x) != virtual_distance(ctx.dv[sv], t)) mask |= 1u << s;
        }
        add(mask);
      }
    }
  }
  return cl;
}

inline bool is_solution(const std::vector<Vertex>& S, const EmdInstance& I, const NodeContext& ctx,
                        const DistanceMatrix& d, PairMode mode = PairMode::Extended) {
  std::uint32_t smask = 0;
  for (Vertex s : S) {
    auto it = std::find(ctx.inside.begin(), ctx.inside.end(), s);
    if (it == ctx.inside.end()) return false;
    smask |= 1u << (it - ctx.inside.begin());
  }
  auto cl = solution_clauses(I, ctx, d, mode);
  if ((smask & cl.fixed_in) != cl.fixed_in || (smask & cl.fixed_out)) return false;
  for (auto h : cl.hit)
    if (!(h & smask)) return false;
  return true;
}

// min |S| over solutions, by enumerating subsets of the non-bag inside vertices.
inline Dim semantic_dim(const EmdInstance& I, const NodeContext& ctx, const DistanceMatrix& d,
                        PairMode mode = PairMode::Extended) {
  auto cl = solution_clauses(I, ctx, d, mode);
  if (cl.impossible) return kInfDim;
  const int m = static_cast<int>(ctx.inside.size());
  if (m > 24) throw std::invalid_argument("semantic_dim limited to |T(X_i)| <= 24");
  const std::uint32_t free_mask = ((m == 32 ? ~0u : (1u << m) - 1u)) & ~cl.fixed_in & ~cl.fixed_out;
  std::vector<int> free_pos;
  for (int a = 0; a < m; ++a)
    if ((free_mask >> a) & 1u) free_pos.push_back(a);
  const int f = static_cast<int>(free_pos.size());
  Dim best = kInfDim;
  for (std::uint32_t sub = 0; sub < (1u << f); ++sub) {
    int cnt = __builtin_popcount(sub);
    if (cnt + __builtin_popcount(cl.fixed_in) >= best) continue;
    std::uint32_t s = cl.fixed_in;
    for (int i = 0; i < f; ++i)
      if ((sub >> i) & 1u) s |= 1u << free_pos[i];
    bool ok = true;
    for (auto h : cl.hit)
      if (!(h & s)) {
        ok = false;
        break;
      }
    if (ok) best = cnt + __builtin_popcount(cl.fixed_in);
  }
  return best;
}

}  // namespace mdim
