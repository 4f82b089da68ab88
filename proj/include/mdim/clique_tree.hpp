#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"

namespace mdim {

enum class NodeKind { Leaf, Introduce, Forget, Join };

inline const char* kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Leaf: return "leaf";
    case NodeKind::Introduce: return "introduce";
    case NodeKind::Forget: return "forget";
    case NodeKind::Join: return "join";
  }
  return "?";
}

struct TreeNode {
  int id = -1;
  NodeKind kind = NodeKind::Leaf;
  // Introduced or forgotten vertex; the bag vertex for a leaf; -1 for joins.
  Vertex vertex = -1;
  std::vector<Vertex> bag;  // ascending
  std::vector<int> children;
  int parent = -1;
};

class NiceCliqueTree {
 public:
  NiceCliqueTree() = default;

  // Wraps raw nodes (ids must equal positions). Subtree caches are filled only when the
  // parent/child links form a tree hanging from `root`; validate_nice_tree reports the rest.
  NiceCliqueTree(std::vector<TreeNode> nodes, int root) : nodes_(std::move(nodes)), root_(root) {
    fill_subtrees();
  }

  int size() const noexcept { return static_cast<int>(nodes_.size()); }
  int root() const noexcept { return root_; }
  const TreeNode& node(int i) const {
    check(i);
    return nodes_[i];
  }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

  const std::vector<Vertex>& subtree_vertices(int i) const {
    check(i);
    if (subtree_.size() != nodes_.size()) throw std::logic_error("subtree cache unavailable for malformed tree");
    return subtree_[i];
  }

  // Children before parents.
  std::vector<int> postorder() const {
    std::vector<int> order;
    if (root_ < 0 || root_ >= size()) return order;
    std::vector<std::pair<int, std::size_t>> stack{{root_, 0}};
    std::vector<char> seen(nodes_.size(), 0);
    seen[root_] = 1;
    while (!stack.empty()) {
      auto& [i, next] = stack.back();
      if (next < nodes_[i].children.size()) {
        int c = nodes_[i].children[next++];
        if (c < 0 || c >= size() || seen[c]) continue;
        seen[c] = 1;
        stack.emplace_back(c, 0);
      } else {
        order.push_back(i);
        stack.pop_back();
      }
    }
    return order;
  }

 private:
  void check(int i) const {
    if (i < 0 || i >= size()) throw std::out_of_range("unknown tree node " + std::to_string(i));
  }

  void fill_subtrees() {
    auto order = postorder();
    if (order.size() != nodes_.size()) return;
    subtree_.assign(nodes_.size(), {});
    for (int i : order) {
      std::vector<Vertex> acc = nodes_[i].bag;
      for (int c : nodes_[i].children) {
        std::vector<Vertex> merged;
        std::set_union(acc.begin(), acc.end(), subtree_[c].begin(), subtree_[c].end(), std::back_inserter(merged));
        acc.swap(merged);
      }
      std::sort(acc.begin(), acc.end());
      acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
      subtree_[i] = std::move(acc);
    }
  }

  std::vector<TreeNode> nodes_;
  int root_ = -1;
  std::vector<std::vector<Vertex>> subtree_;
};

namespace detail {

class TreeBuilder {
 public:
  int leaf(Vertex v) { return add(NodeKind::Leaf, v, {v}, {}); }

  int introduce(int child, Vertex v) {
    auto bag = nodes_[child].bag;
    bag.insert(std::lower_bound(bag.begin(), bag.end(), v), v);
    return add(NodeKind::Introduce, v, std::move(bag), {child});
  }

  int forget(int child, Vertex v) {
    auto bag = nodes_[child].bag;
    bag.erase(std::lower_bound(bag.begin(), bag.end(), v));
    return add(NodeKind::Forget, v, std::move(bag), {child});
  }

  int join(int a, int b) { return add(NodeKind::Join, -1, nodes_[a].bag, {a, b}); }

  // Introduces every vertex of `target` missing from the bag of `node`, ascending.
  int raise_to(int node, const std::vector<Vertex>& target) {
    std::vector<Vertex> missing;
    const auto& bag = nodes_[node].bag;
    std::set_difference(target.begin(), target.end(), bag.begin(), bag.end(), std::back_inserter(missing));
    for (Vertex v : missing) node = introduce(node, v);
    return node;
  }

  const std::vector<Vertex>& bag(int i) const { return nodes_[i].bag; }

  NiceCliqueTree finish(int root) { return NiceCliqueTree(std::move(nodes_), root); }

 private:
  int add(NodeKind kind, Vertex v, std::vector<Vertex> bag, std::vector<int> children) {
    TreeNode n;
    n.id = static_cast<int>(nodes_.size());
    n.kind = kind;
    n.vertex = v;
    n.bag = std::move(bag);
    n.children = std::move(children);
    for (int c : n.children) nodes_[c].parent = n.id;
    nodes_.push_back(std::move(n));
    return nodes_.back().id;
  }

  std::vector<TreeNode> nodes_;
};

}  // namespace detail

// Nice clique tree rooted at a node whose bag is {root}.
//
// Built over the elimination tree of a maximum cardinality search started at `root`: vertex w
// hangs below the latest-visited of its earlier neighbours, and its subtree is closed by
// forgetting w, leaving the bag N+(w). Siblings with equal N+(w) are joined at that bag;
// childless siblings are threaded through the chain as introduce/forget pairs.
inline NiceCliqueTree build_nice_clique_tree(const Graph& g, Vertex root) {
  const int n = g.size();
  if (root < 0 || root >= n) throw GraphError(GraphError::Kind::OutOfRange, "root vertex out of range");
  auto mcs = is_chordal(g, root);
  if (!mcs.chordal)
    throw GraphError(GraphError::Kind::NotChordal,
                     "graph is not chordal (violation at vertex " + std::to_string(mcs.violating_vertex) + ")");

  std::vector<int> position(n);
  for (int i = 0; i < n; ++i) position[mcs.order[i]] = i;
  std::vector<std::vector<Vertex>> kids(n);
  for (Vertex w : mcs.order) {
    const auto& earlier = mcs.earlier_neighbors[w];
    if (earlier.empty()) continue;
    Vertex p = earlier.front();
    for (Vertex u : earlier)
      if (position[u] > position[p]) p = u;
    kids[p].push_back(w);
  }

  detail::TreeBuilder b;
  std::vector<int> top(n, -1);  // node whose bag is N+(w), closing w's subtree
  for (int idx = n - 1; idx >= 0; --idx) {
    Vertex v = mcs.order[idx];
    if (kids[v].empty() && v != root) continue;  // spliced into the parent's chain

    struct Group {
      std::vector<int> branches;
      std::vector<Vertex> pendants;
    };
    std::map<std::vector<Vertex>, Group> groups;
    for (Vertex w : kids[v]) {
      auto& grp = groups[mcs.earlier_neighbors[w]];
      if (kids[w].empty())
        grp.pendants.push_back(w);
      else
        grp.branches.push_back(top[w]);
    }

    int acc = -1;
    for (auto& [sep, grp] : groups) {
      int cur = -1;
      if (grp.branches.empty()) {
        cur = b.raise_to(b.leaf(sep.front()), sep);
      } else {
        cur = grp.branches.front();
        for (std::size_t i = 1; i < grp.branches.size(); ++i) cur = b.join(cur, grp.branches[i]);
      }
      std::sort(grp.pendants.begin(), grp.pendants.end());
      for (Vertex w : grp.pendants) cur = b.forget(b.introduce(cur, w), w);

      if (acc < 0) {
        acc = cur;
      } else {
        std::vector<Vertex> merged;
        std::set_union(b.bag(acc).begin(), b.bag(acc).end(), sep.begin(), sep.end(), std::back_inserter(merged));
        acc = b.join(b.raise_to(acc, merged), b.raise_to(cur, merged));
      }
    }

    std::vector<Vertex> closed = mcs.earlier_neighbors[v];
    closed.push_back(v);
    std::sort(closed.begin(), closed.end());
    if (acc < 0) acc = b.leaf(v);
    acc = b.raise_to(acc, closed);
    top[v] = v == root ? acc : b.forget(acc, v);
  }
  return b.finish(top[root]);
}

// Returns std::nullopt when every structural guarantee holds, else the first violation.
inline std::optional<std::string> validate_nice_tree(const Graph& g, const NiceCliqueTree& t, Vertex root) {
  const int n = g.size();
  const int m = t.size();
  if (m == 0) return "empty tree";
  if (m > 7 * n) return "node count " + std::to_string(m) + " exceeds 7n";
  if (t.root() < 0 || t.root() >= m) return "tree structure: root id out of range";

  for (int i = 0; i < m; ++i) {
    const auto& nd = t.nodes()[i];
    if (nd.id != i) return "tree structure: node id mismatch at " + std::to_string(i);
    for (Vertex v : nd.bag)
      if (v < 0 || v >= n) return "bag vertex out of range at node " + std::to_string(i);
    if (!std::is_sorted(nd.bag.begin(), nd.bag.end()) ||
        std::adjacent_find(nd.bag.begin(), nd.bag.end()) != nd.bag.end())
      return "bag order at node " + std::to_string(i);
    for (int c : nd.children)
      if (c < 0 || c >= m || t.nodes()[c].parent != i) return "tree structure: bad child link at node " + std::to_string(i);
  }

  auto order = t.postorder();
  if (static_cast<int>(order.size()) != m) return "tree structure: nodes unreachable from root or cycle";
  if (t.nodes()[t.root()].parent != -1) return "tree structure: root has a parent";

  const auto& rb = t.nodes()[t.root()].bag;
  if (rb.size() != 1 || rb.front() != root) return "root bag is not {" + std::to_string(root) + "}";

  for (const auto& nd : t.nodes()) {
    const std::string at = " at node " + std::to_string(nd.id);
    switch (nd.kind) {
      case NodeKind::Leaf:
        if (!nd.children.empty() || nd.bag.size() != 1) return "Leaf arity/size" + at;
        break;
      case NodeKind::Introduce: {
        if (nd.children.size() != 1) return "Introduce arity/bag" + at;
        auto expect = t.nodes()[nd.children[0]].bag;
        if (std::binary_search(expect.begin(), expect.end(), nd.vertex)) return "Introduce arity/bag" + at;
        expect.insert(std::lower_bound(expect.begin(), expect.end(), nd.vertex), nd.vertex);
        if (expect != nd.bag) return "Introduce arity/bag" + at;
        break;
      }
      case NodeKind::Forget: {
        if (nd.children.size() != 1) return "Forget arity/bag" + at;
        auto expect = t.nodes()[nd.children[0]].bag;
        auto it = std::lower_bound(expect.begin(), expect.end(), nd.vertex);
        if (it == expect.end() || *it != nd.vertex) return "Forget arity/bag" + at;
        expect.erase(it);
        if (expect != nd.bag) return "Forget arity/bag" + at;
        break;
      }
      case NodeKind::Join:
        if (nd.children.size() != 2 || t.nodes()[nd.children[0]].bag != nd.bag ||
            t.nodes()[nd.children[1]].bag != nd.bag)
          return "Join arity/bag" + at;
        break;
    }
    for (std::size_t a = 0; a < nd.bag.size(); ++a)
      for (std::size_t c = a + 1; c < nd.bag.size(); ++c)
        if (!g.adjacent(nd.bag[a], nd.bag[c])) return "bag not clique" + at;
  }

  // Decomposition axioms: coverage and connectivity of each vertex's bag set.
  std::vector<int> heads(n, 0), seen(n, 0);
  for (const auto& nd : t.nodes()) {
    const std::vector<Vertex>* parent_bag = nd.parent >= 0 ? &t.nodes()[nd.parent].bag : nullptr;
    for (Vertex v : nd.bag) {
      seen[v] = 1;
      if (!parent_bag || !std::binary_search(parent_bag->begin(), parent_bag->end(), v)) ++heads[v];
    }
  }
  for (Vertex v = 0; v < n; ++v) {
    if (!seen[v]) return "vertex coverage: vertex " + std::to_string(v) + " in no bag";
    if (heads[v] != 1) return "vertex connectivity: bags of vertex " + std::to_string(v) + " are not connected";
  }
  {
    std::vector<std::vector<int>> nodes_of(n);
    for (const auto& nd : t.nodes())
      for (Vertex v : nd.bag) nodes_of[v].push_back(nd.id);
    for (auto [u, v] : g.edges()) {
      bool found = false;
      for (int i : nodes_of[u]) {
        const auto& bag = t.nodes()[i].bag;
        if (std::binary_search(bag.begin(), bag.end(), v)) {
          found = true;
          break;
        }
      }
      if (!found) return "edge coverage: edge (" + std::to_string(u) + "," + std::to_string(v) + ") in no bag";
    }
  }

  // Separator property: X_i cuts T(X_i) \ X_i off from the rest.
  std::vector<std::vector<Vertex>> sub(m);
  for (int i : order) {
    std::vector<Vertex> acc = t.nodes()[i].bag;
    for (int c : t.nodes()[i].children) acc.insert(acc.end(), sub[c].begin(), sub[c].end());
    std::sort(acc.begin(), acc.end());
    acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
    sub[i] = std::move(acc);
  }
  for (int i = 0; i < m; ++i)
    if (t.subtree_vertices(i) != sub[i]) return "subtree cache mismatch at node " + std::to_string(i);

  std::vector<int> mark(n);
  std::vector<Vertex> queue;
  for (int i = 0; i < m; ++i) {
    if (i == t.root()) continue;
    std::fill(mark.begin(), mark.end(), 0);  // 0 outside, 1 inside, 2 bag, 3 reached
    for (Vertex v : sub[i]) mark[v] = 1;
    for (Vertex v : t.nodes()[i].bag) mark[v] = 2;
    queue.clear();
    for (Vertex v : sub[i])
      if (mark[v] == 1) {
        mark[v] = 3;
        queue.push_back(v);
      }
    for (std::size_t h = 0; h < queue.size(); ++h)
      for (Vertex w : g.neighbors(queue[h])) {
        if (mark[w] == 0) return "separator property fails at node " + std::to_string(i);
        if (mark[w] == 1) {
          mark[w] = 3;
          queue.push_back(w);
        }
      }
  }
  return std::nullopt;
}

// One record per node: "node <id> <kind> <vertex> bag=<a,b,..> children=<c,..>".
inline std::string export_tree_text(const NiceCliqueTree& t) {
  std::ostringstream out;
  const auto& rb = t.node(t.root()).bag;
  out << "tree nodes=" << t.size() << " root=" << t.root() << " root_vertex=" << (rb.empty() ? -1 : rb.front()) << '\n';
  auto list = [&](const auto& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
    return s;
  };
  for (const auto& nd : t.nodes())
    out << "node " << nd.id << ' ' << kind_name(nd.kind) << ' ' << nd.vertex << " bag=" << list(nd.bag)
        << " children=" << list(nd.children) << '\n';
  return out.str();
}

inline std::string export_tree_dot(const NiceCliqueTree& t) {
  std::ostringstream out;
  out << "digraph nice_clique_tree {\n  node [shape=box];\n";
  for (const auto& nd : t.nodes()) {
    out << "  n" << nd.id << " [label=\"" << nd.id << ' ' << kind_name(nd.kind);
    if (nd.kind == NodeKind::Introduce || nd.kind == NodeKind::Forget) out << ' ' << nd.vertex;
    out << "\\n{";
    for (std::size_t i = 0; i < nd.bag.size(); ++i) out << (i ? "," : "") << nd.bag[i];
    out << "}\"];\n";
    for (int c : nd.children) out << "  n" << nd.id << " -> n" << c << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace mdim
