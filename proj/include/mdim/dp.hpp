#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clique_tree.hpp"
#include "graph.hpp"
#include "instance.hpp"
#include "oracle.hpp"
#include "vectors.hpp"

namespace mdim {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DpOptions {
  std::size_t memo_cap = 10'000'000;
};

struct InstanceBodyHash {
  std::size_t operator()(const EmdInstance& I) const noexcept {
    std::size_t h = I.s_mask;
    for (TraceSet ts : {I.d_int, I.d_ext}) {
      h = h * 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(ts);
      h = h * 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(ts >> 64);
    }
    for (const auto& [r, t] : I.pairs) h = (h * 1000003u ^ r.hash()) * 1000003u ^ t.hash();
    return h;
  }
};

namespace detail {

inline bool bits_subset(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

inline std::vector<std::uint64_t> res_union(const NodeContext& ctx, TraceSet s) {
  std::vector<std::uint64_t> u(ctx.words, 0);
  for (std::uint32_t c = 0; c < ctx.res.size(); ++c)
    if ((s >> c) & 1u)
      for (int w = 0; w < ctx.words; ++w) u[w] |= ctx.res[c][w];
  return u;
}

inline bool resolved_by_any(const DistVec& a, const DistVec& b, TraceSet s, int k) {
  for (std::uint32_t c = 0; c < kMaxTraceCodes; ++c)
    if ((s >> c) & 1u)
      if (vector_resolves(a, b, trace_from_code(c, k))) return true;
  return false;
}

// Does some bag vertex in S_I tell x (vector r) apart from the virtual vertex t?
inline bool resolved_by_bag(const DistVec& r, const DistVec& t, std::uint32_t s_mask, int k) {
  for (int j = 0; j < k; ++j)
    if ((s_mask >> j) & 1u) {
      int virt = t[j];
      for (int l = 0; l < k; ++l)
        if (l != j) virt = std::min(virt, t[l] + 1);
      if (r[j] != virt) return true;
    }
  return false;
}

}  // namespace detail

// All pairs of distinct inside vectors resolved by D_ext, closed upward: every trace that resolves
// nothing new is added. Two D_ext sets with the same closure admit exactly the same solutions.
inline TraceSet ext_closure(const NodeContext& ctx, TraceSet d_ext) {
  if (d_ext == 0) return 0;
  const auto u = detail::res_union(ctx, d_ext);
  TraceSet out = 0;
  for (std::uint32_t c = 0; c < ctx.res.size(); ++c) {
    if (c == all_ones_code(ctx.k)) continue;
    if (detail::bits_subset(ctx.res[c], u)) out |= TraceSet{1} << c;
  }
  return out;
}

// Rewrites I into the canonical representative of its solution class at ctx's node.
// Returns false when no solution can exist.
inline bool canonicalize(EmdInstance& I, const NodeContext& ctx) {
  const int k = ctx.k;
  const TraceSet ones = TraceSet{1} << all_ones_code(k);
  if (I.d_ext & ones) I.d_ext = (I.d_ext & ~ones) | TraceSet{1};
  I.d_int &= ~ctx.free_set(I.s_mask);
  if (I.d_int & ~ctx.inside_traces) return false;
  I.d_ext = ext_closure(ctx, I.d_ext);
  std::vector<VecPair> kept;
  kept.reserve(I.pairs.size());
  for (auto& pr : I.pairs) {
    if (!ctx.has_inside2(pr.first)) continue;
    if (detail::resolved_by_bag(pr.first, pr.second, I.s_mask, k)) continue;
    kept.push_back(pr);
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  I.pairs = std::move(kept);
  return true;
}

// Leaf table: the only candidate solutions are {} and {v}.
inline Dim dim_leaf(EmdInstance I, const NodeContext& ctx) {
  if (!canonicalize(I, ctx)) return kInfDim;
  if (I.s_mask == 0) return (I.d_int == 0 && I.pairs.empty()) ? 0 : kInfDim;
  return (I.d_int == 0 && I.pairs.empty()) ? 1 : kInfDim;
}

// ---------------------------------------------------------------------------------------------
// Child-instance generation. Every function expects I already canonical at its node.

inline std::vector<EmdInstance> candidates_forget(const EmdInstance& I, const NiceCliqueTree& t,
                                                  const NodeContext& ctx, const NodeContext& cctx) {
  const auto& nd = t.node(I.node);
  const int child = nd.children.at(0);
  const int p = static_cast<int>(std::find(cctx.bag.begin(), cctx.bag.end(), nd.vertex) - cctx.bag.begin());
  const int k = ctx.k;

  EmdInstance base;
  base.node = child;
  for (std::uint32_t c = 0; c < kMaxTraceCodes; ++c)
    if ((I.d_ext >> c) & 1u) base.d_ext |= TraceSet{1} << code_lift(c, 1, p);
  for (const auto& [r, tv] : I.pairs) {
    const DistVec tl = lift(tv, tv.min() + 1, p);
    for (const auto& e : cctx.inside2)
      if (drop(e, p) == r) base.pairs.emplace_back(e, tl);
  }

  std::vector<EmdInstance> out;
  std::set<std::pair<std::uint32_t, TraceSet>> seen;
  for (int with_v = 0; with_v < 2; ++with_v) {
    const std::uint32_t cs = code_lift(I.s_mask, with_v, p);
    const TraceSet free = cctx.free_set(cs);
    std::vector<std::vector<std::uint32_t>> options;
    bool dead = false;
    for (std::uint32_t r = 0; r < kMaxTraceCodes && !dead; ++r) {
      if (!((I.d_int >> r) & 1u)) continue;
      std::vector<std::uint32_t> pre{code_lift(r, 0, p), code_lift(r, 1, p)};
      if (r == 0) pre.push_back(all_ones_code(k + 1) & ~(1u << p));
      bool satisfied = false;
      std::vector<std::uint32_t> live;
      for (auto c : pre) {
        if ((free >> c) & 1u) satisfied = true;
        if ((cctx.inside_traces >> c) & 1u) live.push_back(c);
      }
      if (satisfied) continue;
      if (live.empty()) dead = true;
      options.push_back(std::move(live));
    }
    if (dead) continue;
    std::vector<TraceSet> choices{0};
    for (const auto& opt : options) {
      std::vector<TraceSet> next;
      for (auto ch : choices)
        for (auto c : opt) next.push_back(ch | (TraceSet{1} << c));
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      choices.swap(next);
    }
    for (auto ch : choices) {
      if (!seen.insert({cs, ch}).second) continue;
      EmdInstance c = base;
      c.s_mask = cs;
      c.d_int = ch;
      out.push_back(std::move(c));
    }
  }
  return out;
}

struct IntroduceCandidate {
  EmdInstance child;
  int type;  // 1: v not in S, 2: v in S
};

inline std::vector<IntroduceCandidate> candidates_introduce(const EmdInstance& I, const NiceCliqueTree& t,
                                                            const NodeContext& ctx, const NodeContext& cctx) {
  const auto& nd = t.node(I.node);
  const Vertex v = nd.vertex;
  const int k = ctx.k;
  const int p = static_cast<int>(std::find(ctx.bag.begin(), ctx.bag.end(), v) - ctx.bag.begin());
  const bool type2 = (I.s_mask >> p) & 1u;
  const DistVec& vvec = ctx.dv[v];

  EmdInstance base;
  base.node = nd.children.at(0);
  base.s_mask = code_drop(I.s_mask, p);
  for (std::uint32_t c = 0; c < kMaxTraceCodes; ++c)
    if ((I.d_ext >> c) & 1u) base.d_ext |= TraceSet{1} << code_normalize(code_drop(c, p), k - 1);
  if (type2) base.d_ext |= TraceSet{1};

  for (std::uint32_t r = 0; r < kMaxTraceCodes; ++r) {
    if (!((I.d_int >> r) & 1u)) continue;
    if (!((r >> p) & 1u)) return {};
    const std::uint32_t c = code_drop(r, p);
    if (c == all_ones_code(k - 1)) return {};
    base.d_int |= TraceSet{1} << c;
  }

  std::vector<TraceSet> hitting;  // each: some trace in the set must be realised by S \ {v}
  for (const auto& [r, tv] : I.pairs) {
    if (r == vvec) {
      if (type2 && virtual_distance(vvec, tv) != 0) continue;
      const DistVec td = drop(tv, p);
      TraceSet w = 0;
      for (std::uint32_t c = 0; c < kMaxTraceCodes; ++c) {
        if (!((cctx.inside_traces >> c) & 1u)) continue;
        const TraceVec wv = trace_from_code(c, k - 1);
        int val = 1 + tv[p];
        for (int l = 0; l < k - 1; ++l) val = std::min(val, wv[l] + td[l]);
        if (val != 1) w |= TraceSet{1} << c;
      }
      hitting.push_back(w);
    } else {
      if (type2 && r[p] != virtual_distance(vvec, tv)) continue;
      DistVec tc = drop(tv, p);
      for (int l = 0; l < k - 1; ++l) tc.set(l, std::min(tc[l], tv[p] + 1));
      base.pairs.emplace_back(drop(r, p), tc);
    }
  }
  if (!type2) {
    // (x, v) pairs inside T(X_i): whatever D_ext does not settle falls to S \ {v}.
    const DistVec ones = SmallVec::filled(k - 1, 1);
    for (const auto& e : cctx.inside2) {
      const DistVec xi = lift(e, e.min() + 1, p);
      if (!detail::resolved_by_any(xi, vvec, I.d_ext, k)) base.pairs.emplace_back(e, ones);
    }
  }

  const TraceSet have = base.d_int | cctx.free_set(base.s_mask);
  std::vector<TraceSet> open;
  for (auto w : hitting) {
    if (w & have) continue;
    if (w == 0) return {};
    open.push_back(w);
  }
  std::vector<TraceSet> choices{0};
  for (auto w : open) {
    std::vector<TraceSet> next;
    for (auto ch : choices) {
      if (ch & w) {
        next.push_back(ch);
        continue;
      }
      for (std::uint32_t c = 0; c < kMaxTraceCodes; ++c)
        if ((w >> c) & 1u) next.push_back(ch | (TraceSet{1} << c));
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    choices.swap(next);
  }
  // keep only inclusion-minimal choices
  std::vector<TraceSet> minimal;
  for (auto a : choices) {
    bool dominated = false;
    for (auto b : choices)
      if (b != a && (b & a) == b) dominated = true;
    if (!dominated) minimal.push_back(a);
  }
  std::vector<IntroduceCandidate> out;
  for (auto ch : minimal) {
    EmdInstance c = base;
    c.d_int |= ch;
    out.push_back({std::move(c), type2 ? 2 : 1});
  }
  return out;
}

// A join choice before the cross pairs are distributed between the children.
struct JoinBase {
  EmdInstance left, right;
};

struct JoinPlan {
  std::vector<JoinBase> bases;
  // Cross pairs (r1, r2): r1 seen in the left subtree, r2 in the right one, both off the bag.
  // Each must go to the left child as (r1, r2) or to the right child as (r2, r1).
  std::vector<VecPair> cross;
};

inline JoinPlan join_plan(const EmdInstance& I, const NiceCliqueTree& t, const NodeContext& ctx,
                          const NodeContext& c1, const NodeContext& c2) {
  const auto& nd = t.node(I.node);
  const int k = ctx.k;
  JoinPlan plan;
  const TraceSet free = ctx.free_set(I.s_mask);

  for (const auto& r1 : c1.inside2_nonbag)
    for (const auto& r2 : c2.inside2_nonbag) {
      if (std::abs(r1.min() - r2.min()) >= 2) continue;
      bool done = false;
      for (int j = 0; j < k && !done; ++j)
        if (((I.s_mask >> j) & 1u) && r1[j] != r2[j]) done = true;
      if (done || detail::resolved_by_any(r1, r2, I.d_ext, k)) continue;
      plan.cross.emplace_back(r1, r2);
    }

  const TraceSet R1 = c1.nonbag_traces & ~free, R2 = c2.nonbag_traces & ~free;
  if (I.d_int & ~(R1 | R2)) return plan;

  // A trace chosen on one side is worth having only if it covers D_int, adds resolving power
  // on the other side, or settles a pair obligation there.
  auto static_useful = [&](const NodeContext& other, TraceSet R) {
    TraceSet u = 0;
    const auto base = detail::res_union(other, I.d_ext | free);
    for (std::uint32_t c = 0; c < kMaxTraceCodes; ++c) {
      if (!((R >> c) & 1u)) continue;
      bool useful = !detail::bits_subset(other.res[c], base);
      const TraceVec w = trace_from_code(c, k);
      for (const auto& [r, tv] : I.pairs)
        if (!useful && other.has_inside2(r) && vector_resolves(r, tv, w)) useful = true;
      if (useful) u |= TraceSet{1} << c;
    }
    return u;
  };
  const TraceSet U1 = static_useful(c2, R1), U2 = static_useful(c1, R2);

  auto submasks = [](TraceSet m) {
    std::vector<TraceSet> out;
    TraceSet s = m;
    while (true) {
      out.push_back(s);
      if (s == 0) break;
      s = (s - 1) & m;
    }
    std::reverse(out.begin(), out.end());
    return out;
  };
  const auto subs1 = submasks(R1 & (U1 | I.d_int));
  const auto subs2 = submasks(R2 & (U2 | I.d_int));
  for (auto A1 : subs1)
    for (auto A2 : subs2) {
      if (I.d_int & ~(A1 | A2)) continue;
      if ((A1 & ~U1) & ~(I.d_int & ~A2)) continue;
      if ((A2 & ~U2) & ~(I.d_int & ~A1)) continue;
      JoinBase b;
      b.left.node = nd.children[0];
      b.right.node = nd.children[1];
      b.left.s_mask = b.right.s_mask = I.s_mask;
      b.left.d_int = A1;
      b.right.d_int = A2;
      b.left.d_ext = I.d_ext | A2;
      b.right.d_ext = I.d_ext | A1;
      for (const auto& pr : I.pairs) {
        if (c1.has_inside2(pr.first) && !detail::resolved_by_any(pr.first, pr.second, A2 | free, k))
          b.left.pairs.push_back(pr);
        if (c2.has_inside2(pr.first) && !detail::resolved_by_any(pr.first, pr.second, A1 | free, k))
          b.right.pairs.push_back(pr);
      }
      plan.bases.push_back(std::move(b));
    }
  return plan;
}

inline std::vector<std::pair<EmdInstance, EmdInstance>> candidates_join(const EmdInstance& I, const NiceCliqueTree& t,
                                                                        const NodeContext& ctx, const NodeContext& c1,
                                                                        const NodeContext& c2) {
  auto plan = join_plan(I, t, ctx, c1, c2);
  const std::size_t u = plan.cross.size();
  if (u > 20) throw BudgetExceeded("too many cross pairs to enumerate join candidates");
  std::vector<std::pair<EmdInstance, EmdInstance>> out;
  for (const auto& b : plan.bases)
    for (std::uint32_t part = 0; part < (1u << u); ++part) {
      auto l = b.left, r = b.right;
      for (std::size_t e = 0; e < u; ++e) {
        const auto& [r1, r2] = plan.cross[e];
        if ((part >> e) & 1u)
          l.pairs.emplace_back(r1, r2);
        else
          r.pairs.emplace_back(r2, r1);
      }
      out.emplace_back(std::move(l), std::move(r));
    }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Compatibility predicates. They accept any child instance that is at least as constrained as
// the generated one in D_int and D_pairs and resolution-equivalent in D_ext.

namespace detail {

inline bool pairs_cover(const std::vector<VecPair>& need, std::vector<VecPair> have) {
  std::sort(have.begin(), have.end());
  for (const auto& p : need)
    if (!std::binary_search(have.begin(), have.end(), p)) return false;
  return true;
}

inline bool covers(const EmdInstance& generated, const EmdInstance& child, const NodeContext& cctx) {
  EmdInstance g = generated, c = child;
  if (g.s_mask != c.s_mask) return false;
  const bool gok = canonicalize(g, cctx);
  const bool cok = canonicalize(c, cctx);
  if (!cok) return true;  // an unsatisfiable child never lowers the minimum
  if (!gok) return false;
  if (g.d_ext != c.d_ext) return false;
  if ((g.d_int & ~c.d_int) != 0) return false;
  return pairs_cover(g.pairs, c.pairs);
}

}  // namespace detail

inline bool is_compatible_forget(const EmdInstance& I, const EmdInstance& I1, const NiceCliqueTree& t,
                                 const NodeContext& ctx, const NodeContext& cctx) {
  for (const auto& c : candidates_forget(I, t, ctx, cctx))
    if (detail::covers(c, I1, cctx)) return true;
  return false;
}

inline bool is_compatible_introduce(const EmdInstance& I, const EmdInstance& I1, int type, const NiceCliqueTree& t,
                                    const NodeContext& ctx, const NodeContext& cctx) {
  const int p = static_cast<int>(std::find(ctx.bag.begin(), ctx.bag.end(), t.node(I.node).vertex) - ctx.bag.begin());
  if (type != (((I.s_mask >> p) & 1u) ? 2 : 1)) return false;
  for (const auto& c : candidates_introduce(I, t, ctx, cctx))
    if (detail::covers(c.child, I1, cctx)) return true;
  return false;
}

inline bool is_compatible_join(const EmdInstance& I, const EmdInstance& I1, const EmdInstance& I2,
                               const NiceCliqueTree& t, const NodeContext& ctx, const NodeContext& c1,
                               const NodeContext& c2) {
  if (I1.s_mask != I.s_mask || I2.s_mask != I.s_mask) return false;
  const int k = ctx.k;
  const TraceSet free = ctx.free_set(I.s_mask);
  // demanded traces come from a child or from the bag
  if (I.d_int & ~(I1.d_int | I2.d_int | free)) return false;
  // each child sees the parent's external traces plus the other child's demands, up to
  // resolution equivalence
  EmdInstance e1{I1.node, I.s_mask, 0, I.d_ext | I2.d_int, {}};
  EmdInstance e2{I2.node, I.s_mask, 0, I.d_ext | I1.d_int, {}};
  EmdInstance g1 = I1, g2 = I2;
  if (!canonicalize(g1, c1) || !canonicalize(g2, c2)) return true;
  canonicalize(e1, c1);
  canonicalize(e2, c2);
  if (g1.d_ext != e1.d_ext || g2.d_ext != e2.d_ext) return false;
  // listed pairs go to every side that realises their inside vector
  std::vector<VecPair> need1, need2;
  for (const auto& pr : I.pairs) {
    if (c1.has_inside2(pr.first) && !detail::resolved_by_any(pr.first, pr.second, I2.d_int | free, k))
      need1.push_back(pr);
    if (c2.has_inside2(pr.first) && !detail::resolved_by_any(pr.first, pr.second, I1.d_int | free, k))
      need2.push_back(pr);
  }
  if (!detail::pairs_cover(need1, I1.pairs) || !detail::pairs_cover(need2, I2.pairs)) return false;
  // near pairs split across the two subtrees
  auto plan_cross = join_plan(I, t, ctx, c1, c2).cross;
  std::vector<VecPair> p1 = I1.pairs, p2 = I2.pairs;
  std::sort(p1.begin(), p1.end());
  std::sort(p2.begin(), p2.end());
  for (const auto& [r1, r2] : plan_cross)
    if (!std::binary_search(p1.begin(), p1.end(), VecPair{r1, r2}) &&
        !std::binary_search(p2.begin(), p2.end(), VecPair{r2, r1}))
      return false;
  return true;
}

// ---------------------------------------------------------------------------------------------

struct PhaseTimes {
  double tree_ms = 0, context_ms = 0, solve_ms = 0, witness_ms = 0;
};

// Memoised evaluation of the extended dimension over one nice clique tree.
class RootedSolver {
 public:
  RootedSolver(const Graph& g, const DistanceMatrix& d, Vertex root, DpOptions opt = {})
      : g_(g), d_(d), root_(root), opt_(opt) {
    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    tree_ = build_nice_clique_tree(g, root);
    auto t1 = clock::now();
    for (const auto& nd : tree_.nodes())
      if (static_cast<int>(nd.bag.size()) > kMaxDpBag)
        throw std::invalid_argument("clique number above " + std::to_string(kMaxDpBag) + " is not supported");
    ctx_.reserve(tree_.size());
    for (int i = 0; i < tree_.size(); ++i) ctx_.push_back(node_context(tree_, i, d));
    memo_.resize(tree_.size());
    auto t2 = clock::now();
    times_.tree_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    times_.context_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
  }

  const NiceCliqueTree& tree() const { return tree_; }
  const NodeContext& context(int node) const { return ctx_.at(node); }
  const PhaseTimes& times() const { return times_; }
  std::size_t memo_entries() const { return total_entries_; }

  EmdInstance root_instance() const {
    EmdInstance I;
    I.node = tree_.root();
    I.s_mask = 1;
    I.d_int = TraceSet{1};  // the root's own trace (0)
    return I;
  }

  Dim imd() {
    auto t0 = std::chrono::steady_clock::now();
    Dim v = dim_of(root_instance());
    times_.solve_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return v;
  }

  Dim dim_of(const EmdInstance& I) { return value(eval(I)); }

  // A minimum solution of I, rebuilt from the recorded choices; empty optional when dim is infinite.
  std::optional<std::vector<Vertex>> witness(const EmdInstance& I) {
    auto t0 = std::chrono::steady_clock::now();
    Ref r = eval(I);
    if (value(r) >= kInfDim) return std::nullopt;
    std::vector<Vertex> out;
    collect(r, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    times_.witness_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }

  // Visits every memoised (canonical instance, value).
  void for_each_entry(const std::function<void(const EmdInstance&, Dim)>& f) const {
    for (const auto& m : memo_)
      for (std::size_t i = 0; i < m.keys.size(); ++i) f(m.keys[i], m.entries[i].dim);
  }

 private:
  struct Ref {
    int node = -1;
    int id = -1;  // -1: infeasible
  };
  struct Entry {
    Dim dim = kInfDim;
    Ref a, b;
    bool add_v = false;
  };
  struct NodeMemo {
    std::unordered_map<EmdInstance, int, InstanceBodyHash> index;
    std::vector<EmdInstance> keys;
    std::vector<Entry> entries;
  };

  Dim value(Ref r) const { return r.id < 0 ? kInfDim : memo_[r.node].entries[r.id].dim; }

  Ref eval(EmdInstance I) {
    const int node = I.node;
    const NodeContext& ctx = ctx_[node];
    if (!canonicalize(I, ctx)) return {node, -1};
    auto& m = memo_[node];
    if (auto it = m.index.find(I); it != m.index.end()) return {node, it->second};

    Entry e = compute(I);
    if (++total_entries_ > opt_.memo_cap)
      throw BudgetExceeded("memo budget of " + std::to_string(opt_.memo_cap) + " entries exceeded");
    const int id = static_cast<int>(m.entries.size());
    m.index.emplace(I, id);
    m.keys.push_back(std::move(I));
    m.entries.push_back(e);
    return {node, id};
  }

  Entry compute(const EmdInstance& I) {
    const auto& nd = tree_.node(I.node);
    const NodeContext& ctx = ctx_[I.node];
    Entry best;
    switch (nd.kind) {
      case NodeKind::Leaf:
        best.dim = dim_leaf(I, ctx);
        break;
      case NodeKind::Forget:
        for (auto& c : candidates_forget(I, tree_, ctx, ctx_[nd.children[0]])) {
          Ref r = eval(std::move(c));
          if (value(r) < best.dim) {
            best.dim = value(r);
            best.a = r;
          }
        }
        break;
      case NodeKind::Introduce:
        for (auto& c : candidates_introduce(I, tree_, ctx, ctx_[nd.children[0]])) {
          Ref r = eval(std::move(c.child));
          Dim v = dim_add(value(r), c.type == 2 ? 1 : 0);
          if (v < best.dim) {
            best.dim = v;
            best.a = r;
            best.add_v = c.type == 2;
          }
        }
        break;
      case NodeKind::Join:
        best = compute_join(I);
        break;
    }
    return best;
  }

  // For each base choice, the cross pairs are split between the children by branch and bound:
  // both child values only grow as pairs are added, so the current sum is a lower bound.
  Entry compute_join(const EmdInstance& I) {
    const auto& nd = tree_.node(I.node);
    const auto& c1 = ctx_[nd.children[0]];
    const auto& c2 = ctx_[nd.children[1]];
    auto plan = join_plan(I, tree_, ctx_[I.node], c1, c2);
    const int sub = __builtin_popcount(I.s_mask);
    const int u = static_cast<int>(plan.cross.size());
    Entry best;

    for (const auto& b : plan.bases) {
      Ref l0 = eval(b.left), r0 = eval(b.right);
      if (value(l0) >= kInfDim || value(r0) >= kInfDim) continue;
      if (value(l0) + value(r0) - sub >= best.dim) continue;

      std::vector<char> side(u, 0);  // 0 undecided, 1 left, 2 right
      auto make = [&](int which) {
        EmdInstance x = which == 1 ? b.left : b.right;
        for (int e = 0; e < u; ++e) {
          const auto& [r1, r2] = plan.cross[e];
          if (which == 1 && side[e] == 1) x.pairs.emplace_back(r1, r2);
          if (which == 2 && side[e] == 2) x.pairs.emplace_back(r2, r1);
        }
        return x;
      };
      auto make_all = [&](int which) {
        EmdInstance x = which == 1 ? b.left : b.right;
        for (int e = 0; e < u; ++e) {
          const auto& [r1, r2] = plan.cross[e];
          if (which == 1 && side[e] != 2) x.pairs.emplace_back(r1, r2);
          if (which == 2 && side[e] != 1) x.pairs.emplace_back(r2, r1);
        }
        return x;
      };
      auto consider = [&](Ref l, Ref r) {
        Dim v = value(l) + value(r) - sub;
        if (v < best.dim) {
          best.dim = v;
          best.a = l;
          best.b = r;
        }
      };
      std::function<void(int, Ref, Ref)> dfs = [&](int e, Ref l, Ref r) {
        if (value(l) >= kInfDim || value(r) >= kInfDim) return;
        if (value(l) + value(r) - sub >= best.dim) return;
        if (e == u) {
          consider(l, r);
          return;
        }
        // If one child absorbs every undecided pair at no extra cost, that completes optimally.
        Ref lall = eval(make_all(1));
        if (value(lall) == value(l)) {
          consider(lall, r);
          return;
        }
        Ref rall = eval(make_all(2));
        if (value(rall) == value(r)) {
          consider(l, rall);
          return;
        }
        side[e] = 1;
        dfs(e + 1, eval(make(1)), r);
        side[e] = 2;
        dfs(e + 1, l, eval(make(2)));
        side[e] = 0;
      };
      dfs(0, l0, r0);
    }
    return best;
  }

  void collect(Ref r, std::vector<Vertex>& out) const {
    const auto& nd = tree_.node(r.node);
    const auto& e = memo_[r.node].entries[r.id];
    const auto& key = memo_[r.node].keys[r.id];
    switch (nd.kind) {
      case NodeKind::Leaf:
        if (key.s_mask & 1u) out.push_back(nd.bag[0]);
        break;
      case NodeKind::Introduce:
        if (e.add_v) out.push_back(nd.vertex);
        collect(e.a, out);
        break;
      case NodeKind::Forget:
        collect(e.a, out);
        break;
      case NodeKind::Join:
        collect(e.a, out);
        collect(e.b, out);
        break;
    }
  }

  const Graph& g_;
  const DistanceMatrix& d_;
  Vertex root_;
  DpOptions opt_;
  NiceCliqueTree tree_;
  std::vector<NodeContext> ctx_;
  std::vector<NodeMemo> memo_;
  std::size_t total_entries_ = 0;
  PhaseTimes times_;
};

inline Dim imd(const Graph& g, Vertex root, DpOptions opt = {}) {
  const auto d = all_pairs_distances(g);
  RootedSolver s(g, d, root, opt);
  return s.imd();
}

struct RootRun {
  Vertex root = -1;
  Dim value = kInfDim;
  std::size_t memo_entries = 0;
  PhaseTimes times;
};

struct MetricDimensionResult {
  int dim = 0;
  std::vector<Vertex> witness;
  Vertex best_root = -1;
  std::vector<RootRun> runs;
  bool witness_verified = false;
};

// Minimum over roots of the rooted value; per-root runs are independent and may use `jobs` threads.
inline MetricDimensionResult metric_dimension(const Graph& g, DpOptions opt = {}, int jobs = 1) {
  MetricDimensionResult res;
  const int n = g.size();
  auto mcs = is_chordal(g);
  if (!mcs.chordal) throw GraphError(GraphError::Kind::NotChordal, "graph is not chordal");
  if (n == 1) {
    res.witness_verified = true;
    return res;
  }
  const auto d = all_pairs_distances(g);
  res.runs.resize(n);
  std::vector<std::vector<Vertex>> witnesses(n);
  std::vector<std::exception_ptr> errors(n);

  auto run = [&](Vertex r) {
    try {
      RootedSolver s(g, d, r, opt);
      RootRun rr;
      rr.root = r;
      rr.value = s.imd();
      if (rr.value < kInfDim) witnesses[r] = s.witness(s.root_instance()).value_or(std::vector<Vertex>{});
      rr.memo_entries = s.memo_entries();
      rr.times = s.times();
      res.runs[r] = rr;
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (Vertex r = 0; r < n; ++r) run(r);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        for (int r; (r = next.fetch_add(1)) < n;) run(r);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  res.dim = kInfDim;
  for (const auto& rr : res.runs)
    if (rr.value < res.dim) {
      res.dim = rr.value;
      res.best_root = rr.root;
    }
  res.witness = witnesses[res.best_root];
  res.witness_verified = static_cast<int>(res.witness.size()) == res.dim && is_resolving_set(res.witness, d);
  return res;
}

}  // namespace mdim
