#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mdim {

using Vertex = int;
using Edge = std::pair<Vertex, Vertex>;

class GraphError : public std::runtime_error {
 public:
  enum class Kind { Format, Loop, DuplicateEdge, OutOfRange, Disconnected, InvalidParameter, NotChordal };

  GraphError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Simple, connected, undirected graph on vertices 0..n-1. Immutable once built.
class Graph {
 public:
  Graph(int n, const std::vector<Edge>& edges) : adjacency_(n > 0 ? n : 0) {
    if (n < 1) throw GraphError(GraphError::Kind::InvalidParameter, "graph needs at least one vertex");
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= n || v >= n)
        throw GraphError(GraphError::Kind::OutOfRange,
                         "edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
      if (u == v) throw GraphError(GraphError::Kind::Loop, "loop at vertex " + std::to_string(u));
      adjacency_[u].push_back(v);
      adjacency_[v].push_back(u);
    }
    for (auto& nb : adjacency_) {
      std::sort(nb.begin(), nb.end());
      if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
        throw GraphError(GraphError::Kind::DuplicateEdge, "duplicate edge");
    }
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v : adjacency_[u])
        if (u < v) edges_.emplace_back(u, v);

    std::vector<char> seen(n, 0);
    std::vector<Vertex> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      for (Vertex v : adjacency_[u])
        if (!seen[v]) {
          seen[v] = 1;
          ++reached;
          stack.push_back(v);
        }
    }
    if (reached != n)
      throw GraphError(GraphError::Kind::Disconnected,
                       "graph is disconnected (" + std::to_string(reached) + " of " + std::to_string(n) +
                           " vertices reachable from 0)");
  }

  int size() const noexcept { return static_cast<int>(adjacency_.size()); }
  const std::vector<Vertex>& neighbors(Vertex v) const { return adjacency_[v]; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  bool adjacent(Vertex u, Vertex v) const {
    const auto& nb = adjacency_[u];
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.adjacency_ == b.adjacency_; }

 private:
  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<Edge> edges_;
};

// Full n x n hop-count matrix.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(int n) : n_(n), dist_(static_cast<std::size_t>(n) * n, -1) {}

  int size() const noexcept { return n_; }
  int operator()(Vertex x, Vertex y) const { return dist_[static_cast<std::size_t>(x) * n_ + y]; }
  int& at(Vertex x, Vertex y) { return dist_[static_cast<std::size_t>(x) * n_ + y]; }

  template <typename Range>
  int dist_to_set(Vertex x, const Range& set) const {
    int best = -1;
    for (Vertex u : set) {
      int d = (*this)(x, u);
      if (best < 0 || d < best) best = d;
    }
    return best;
  }

 private:
  int n_ = 0;
  std::vector<int> dist_;
};

inline DistanceMatrix all_pairs_distances(const Graph& g) {
  const int n = g.size();
  DistanceMatrix d(n);
  std::vector<Vertex> queue(n);
  for (Vertex s = 0; s < n; ++s) {
    std::size_t head = 0, tail = 0;
    queue[tail++] = s;
    d.at(s, s) = 0;
    while (head < tail) {
      Vertex u = queue[head++];
      for (Vertex v : g.neighbors(u))
        if (d(s, v) < 0) {
          d.at(s, v) = d(s, u) + 1;
          queue[tail++] = v;
        }
    }
  }
  return d;
}

// Edge-list text: "n m" then m lines "u v".
inline Graph parse_graph(std::string_view text) {
  std::istringstream in{std::string(text)};
  long long n = 0, m = 0;
  if (!(in >> n >> m)) throw GraphError(GraphError::Kind::Format, "expected header 'n m'");
  if (n < 1 || m < 0) throw GraphError(GraphError::Kind::Format, "header values out of range");
  if (n > 1'000'000) throw GraphError(GraphError::Kind::Format, "vertex count too large");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    long long u = 0, v = 0;
    if (!(in >> u >> v))
      throw GraphError(GraphError::Kind::Format, "expected " + std::to_string(m) + " edges, got " + std::to_string(i));
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw GraphError(GraphError::Kind::OutOfRange,
                       "edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  std::string extra;
  if (in >> extra) throw GraphError(GraphError::Kind::Format, "trailing content after edge list");
  return Graph(static_cast<int>(n), edges);
}

inline std::string format_graph(const Graph& g) {
  std::ostringstream out;
  out << g.size() << ' ' << g.edges().size() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
  return out.str();
}

struct ChordalityResult {
  bool chordal = false;
  // Maximum-cardinality-search visit order; its reverse is a perfect elimination ordering when chordal.
  std::vector<Vertex> order;
  // For each vertex, its neighbours visited earlier (ascending id).
  std::vector<std::vector<Vertex>> earlier_neighbors;
  Vertex violating_vertex = -1;
};

// Maximum cardinality search from `start`, ties broken by smallest id, followed by the
// Tarjan-Yannakakis zero-fill check.
inline ChordalityResult is_chordal(const Graph& g, Vertex start = 0) {
  const int n = g.size();
  ChordalityResult res;
  std::vector<int> label(n, 0);
  std::vector<int> position(n, -1);
  // Buckets keyed by label; lazy deletion keeps this O(n + m) amortised.
  std::vector<std::vector<Vertex>> buckets(n + 1);
  for (Vertex v = n - 1; v >= 0; --v) buckets[0].push_back(v);
  int top = 0;
  res.order.reserve(n);
  for (int step = 0; step < n; ++step) {
    Vertex pick = -1;
    if (step == 0) {
      pick = start;
    } else {
      while (pick < 0) {
        // smallest id among the live vertices in the top bucket
        auto& b = buckets[top];
        Vertex best = -1;
        for (Vertex v : b)
          if (position[v] < 0 && label[v] == top && (best < 0 || v < best)) best = v;
        if (best < 0) {
          b.clear();
          --top;
          continue;
        }
        pick = best;
      }
    }
    position[pick] = step;
    res.order.push_back(pick);
    for (Vertex u : g.neighbors(pick))
      if (position[u] < 0) {
        ++label[u];
        buckets[label[u]].push_back(u);
        top = std::max(top, label[u]);
      }
  }

  res.earlier_neighbors.assign(n, {});
  for (Vertex v = 0; v < n; ++v)
    for (Vertex u : g.neighbors(v))
      if (position[u] < position[v]) res.earlier_neighbors[v].push_back(u);

  res.chordal = true;
  for (Vertex v : res.order) {
    const auto& earlier = res.earlier_neighbors[v];
    if (earlier.size() < 2) continue;
    Vertex parent = earlier.front();
    for (Vertex u : earlier)
      if (position[u] > position[parent]) parent = u;
    for (Vertex u : earlier)
      if (u != parent && !g.adjacent(u, parent)) {
        res.chordal = false;
        res.violating_vertex = v;
        return res;
      }
  }
  return res;
}

// Maximal cliques of a chordal graph (each sorted ascending), in MCS visit order of their last vertex.
inline std::vector<std::vector<Vertex>> maximal_cliques(const Graph& g, const ChordalityResult& mcs) {
  const int n = g.size();
  std::vector<int> position(n);
  for (int i = 0; i < n; ++i) position[mcs.order[i]] = i;
  std::vector<char> maximal(n, 1);
  for (Vertex w = 0; w < n; ++w) {
    const auto& earlier = mcs.earlier_neighbors[w];
    if (earlier.empty()) continue;
    Vertex parent = earlier.front();
    for (Vertex u : earlier)
      if (position[u] > position[parent]) parent = u;
    // {parent} + earlier(parent) is contained in {w} + earlier(w) exactly when the sizes line up.
    if (mcs.earlier_neighbors[parent].size() + 1 == earlier.size()) maximal[parent] = 0;
  }
  std::vector<std::vector<Vertex>> cliques;
  for (Vertex v : mcs.order) {
    if (!maximal[v]) continue;
    std::vector<Vertex> c = mcs.earlier_neighbors[v];
    c.push_back(v);
    std::sort(c.begin(), c.end());
    cliques.push_back(std::move(c));
  }
  return cliques;
}

inline int clique_number(const Graph& g) {
  auto mcs = is_chordal(g);
  if (!mcs.chordal) throw GraphError(GraphError::Kind::NotChordal, "clique number requested for a non-chordal graph");
  std::size_t best = 0;
  for (const auto& c : maximal_cliques(g, mcs)) best = std::max(best, c.size());
  return static_cast<int>(best);
}

namespace detail {

// Unbiased draw in [0, bound) from a fully specified engine, so outputs are portable.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace detail

// Grows a chordal graph one vertex at a time: each new vertex attaches to a random sub-clique
// (size uniform in [1, omega-1], capped by the host) of a uniformly chosen maximal clique.
inline Graph random_chordal(int n, int omega, std::uint64_t seed) {
  if (n < 1) throw GraphError(GraphError::Kind::InvalidParameter, "n must be at least 1");
  if (omega < 2) throw GraphError(GraphError::Kind::InvalidParameter, "omega must be at least 2");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Vertex>> cliques{{0}};
  std::vector<Edge> edges;
  for (Vertex v = 1; v < n; ++v) {
    std::size_t host = detail::uniform_below(rng, cliques.size());
    auto& k = cliques[host];
    const int cap = std::min<int>(omega - 1, static_cast<int>(k.size()));
    const int size = 1 + static_cast<int>(detail::uniform_below(rng, cap));
    // partial Fisher-Yates over a copy picks `size` members uniformly
    std::vector<Vertex> pool = k;
    for (int i = 0; i < size; ++i) {
      std::size_t j = i + detail::uniform_below(rng, pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    std::vector<Vertex> attach(pool.begin(), pool.begin() + size);
    std::sort(attach.begin(), attach.end());
    for (Vertex u : attach) edges.emplace_back(u, v);
    attach.push_back(v);
    if (static_cast<int>(attach.size()) == static_cast<int>(k.size()) + 1)
      k = attach;
    else
      cliques.push_back(std::move(attach));
  }
  return Graph(n, edges);
}

}  // namespace mdim
