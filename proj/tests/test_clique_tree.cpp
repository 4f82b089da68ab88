#include <gtest/gtest.h>

#include <algorithm>

#include "mdim/clique_tree.hpp"
#include "test_support.hpp"

using namespace mdim;
using namespace mdim::testing;

namespace {

TreeNode make_node(int id, NodeKind kind, Vertex v, std::vector<Vertex> bag, std::vector<int> children, int parent) {
  TreeNode nd;
  nd.id = id;
  nd.kind = kind;
  nd.vertex = v;
  nd.bag = std::move(bag);
  nd.children = std::move(children);
  nd.parent = parent;
  return nd;
}

std::string violation(const Graph& g, const NiceCliqueTree& t, Vertex root) {
  return validate_nice_tree(g, t, root).value_or("");
}

}  // namespace

TEST(NiceTree, PathRootedAtEnd) {
  Graph g = path_graph(3);
  auto t = build_nice_clique_tree(g, 0);
  EXPECT_FALSE(validate_nice_tree(g, t, 0)) << violation(g, t, 0);
  EXPECT_LE(t.size(), 21);
  EXPECT_EQ(t.node(t.root()).bag, std::vector<Vertex>{0});
  EXPECT_EQ(t.subtree_vertices(t.root()), (std::vector<Vertex>{0, 1, 2}));
}

TEST(NiceTree, SingleEdgeAndSingleVertex) {
  Graph k2 = complete_graph(2);
  for (Vertex r = 0; r < 2; ++r) {
    auto t = build_nice_clique_tree(k2, r);
    EXPECT_FALSE(validate_nice_tree(k2, t, r)) << violation(k2, t, r);
  }
  Graph k1(1, {});
  auto t = build_nice_clique_tree(k1, 0);
  EXPECT_EQ(t.size(), 1);
  EXPECT_EQ(t.node(0).kind, NodeKind::Leaf);
  EXPECT_FALSE(validate_nice_tree(k1, t, 0));
}

TEST(NiceTree, SubtreeVerticesFollowNodeKinds) {
  Graph g = random_chordal(25, 4, 3);
  auto t = build_nice_clique_tree(g, 5);
  for (const auto& nd : t.nodes()) {
    const auto& own = t.subtree_vertices(nd.id);
    switch (nd.kind) {
      case NodeKind::Leaf:
        EXPECT_EQ(own, nd.bag);
        break;
      case NodeKind::Introduce: {
        auto expect = t.subtree_vertices(nd.children[0]);
        expect.insert(std::lower_bound(expect.begin(), expect.end(), nd.vertex), nd.vertex);
        EXPECT_EQ(own, expect);
        break;
      }
      case NodeKind::Forget:
        EXPECT_EQ(own, t.subtree_vertices(nd.children[0]));
        break;
      case NodeKind::Join: {
        std::vector<Vertex> expect;
        const auto& a = t.subtree_vertices(nd.children[0]);
        const auto& b = t.subtree_vertices(nd.children[1]);
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(expect));
        EXPECT_EQ(own, expect);
        break;
      }
    }
  }
}

TEST(NiceTree, ValidOnCorpusForSeveralRoots) {
  for (const auto& g : corpus(40, 1, 120, 6, 41)) {
    const int n = g.size();
    for (Vertex r : {0, n / 2, n - 1}) {
      auto t = build_nice_clique_tree(g, r);
      ASSERT_FALSE(validate_nice_tree(g, t, r)) << violation(g, t, r);
      ASSERT_LE(t.size(), 7 * n);
    }
  }
}

TEST(NiceTree, StarsAndCliques) {
  for (int m = 1; m <= 12; ++m) {
    Graph s = star_graph(m);
    for (Vertex r = 0; r <= m; ++r) {
      auto t = build_nice_clique_tree(s, r);
      ASSERT_FALSE(validate_nice_tree(s, t, r)) << violation(s, t, r);
    }
  }
  for (int n = 2; n <= 6; ++n) {
    Graph k = complete_graph(n);
    auto t = build_nice_clique_tree(k, n - 1);
    ASSERT_FALSE(validate_nice_tree(k, t, n - 1)) << violation(k, t, n - 1);
  }
}

TEST(NiceTree, UsesAllNodeKinds) {
  bool seen[4] = {false, false, false, false};
  for (const auto& g : corpus(20, 10, 30, 4, 5)) {
    auto t = build_nice_clique_tree(g, 0);
    for (const auto& nd : t.nodes()) seen[static_cast<int>(nd.kind)] = true;
  }
  for (bool b : seen) EXPECT_TRUE(b);
}

TEST(NiceTree, Deterministic) {
  Graph g = random_chordal(40, 5, 11);
  EXPECT_EQ(export_tree_text(build_nice_clique_tree(g, 7)), export_tree_text(build_nice_clique_tree(g, 7)));
}

TEST(NiceTree, RejectsBadInput) {
  EXPECT_THROW(build_nice_clique_tree(cycle_graph(4), 0), GraphError);
  EXPECT_THROW(build_nice_clique_tree(path_graph(3), 3), GraphError);
  auto t = build_nice_clique_tree(path_graph(3), 0);
  EXPECT_THROW(t.node(t.size()), std::out_of_range);
  EXPECT_THROW(t.subtree_vertices(-1), std::out_of_range);
}

TEST(NiceTreeValidator, NonCliqueBag) {
  Graph g = path_graph(3);
  NiceCliqueTree t({make_node(0, NodeKind::Leaf, 0, {0}, {}, 1),
                    make_node(1, NodeKind::Introduce, 2, {0, 2}, {0}, 2),
                    make_node(2, NodeKind::Forget, 2, {0}, {1}, -1)},
                   2);
  EXPECT_NE(violation(g, t, 0).find("bag not clique"), std::string::npos) << violation(g, t, 0);
}

TEST(NiceTreeValidator, LeafWithTwoVertices) {
  Graph g = complete_graph(2);
  NiceCliqueTree t({make_node(0, NodeKind::Leaf, 0, {0, 1}, {}, 1), make_node(1, NodeKind::Forget, 1, {0}, {0}, -1)},
                   1);
  EXPECT_NE(violation(g, t, 0).find("Leaf arity/size"), std::string::npos) << violation(g, t, 0);
}

TEST(NiceTreeValidator, WrongRootAndMissingEdge) {
  Graph g = complete_graph(2);
  auto t = build_nice_clique_tree(g, 0);
  EXPECT_NE(violation(g, t, 1).find("root bag"), std::string::npos);
  // a tree over a single bag {0} never covers vertex 1
  NiceCliqueTree lone({make_node(0, NodeKind::Leaf, 0, {0}, {}, -1)}, 0);
  EXPECT_FALSE(violation(g, lone, 0).empty());
}

TEST(NiceTreeValidator, JoinWithMismatchedChildren) {
  Graph g = path_graph(3);
  NiceCliqueTree t({make_node(0, NodeKind::Leaf, 1, {1}, {}, 2), make_node(1, NodeKind::Leaf, 0, {0}, {}, 2),
                    make_node(2, NodeKind::Join, -1, {1}, {0, 1}, -1)},
                   2);
  EXPECT_NE(violation(g, t, 1).find("Join arity/bag"), std::string::npos) << violation(g, t, 1);
}

TEST(TreeExport, TextAndDot) {
  Graph g = path_graph(3);
  auto t = build_nice_clique_tree(g, 1);
  const auto text = export_tree_text(t);
  EXPECT_EQ(text.rfind("tree nodes=" + std::to_string(t.size()), 0), 0u);
  EXPECT_NE(text.find("root_vertex=1"), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), t.size() + 1);
  const auto dot = export_tree_dot(t);
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '>'), t.size() - 1);
}
