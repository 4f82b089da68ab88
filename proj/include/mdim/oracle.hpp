#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"

namespace mdim {

inline constexpr int kOracleHardCap = 20;

struct ResolvingSetReport {
  int size = 0;
  std::vector<Vertex> witness;
  std::optional<Vertex> required;
};

inline bool resolves(Vertex s, Vertex u, Vertex v, const DistanceMatrix& d) { return d(s, u) != d(s, v); }

template <typename Range>
bool is_resolving_set(const Range& set, const DistanceMatrix& d) {
  const int n = d.size();
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) {
      bool ok = false;
      for (Vertex s : set)
        if (d(s, u) != d(s, v)) {
          ok = true;
          break;
        }
      if (!ok) return false;
    }
  return true;
}

inline bool is_resolving_set(const std::vector<Vertex>& set, const Graph& g) {
  return is_resolving_set(set, all_pairs_distances(g));
}

// Exhaustive search by cardinality, then lexicographically on sorted ids.
inline ResolvingSetReport min_resolving_set(const Graph& g, std::optional<Vertex> required = std::nullopt,
                                            int max_n = kOracleHardCap) {
  const int n = g.size();
  if (n > std::min(max_n, kOracleHardCap))
    throw std::invalid_argument("oracle refuses n=" + std::to_string(n) + " (limit " +
                                std::to_string(std::min(max_n, kOracleHardCap)) + ")");
  if (required && (*required < 0 || *required >= n)) throw std::invalid_argument("required vertex out of range");
  const auto d = all_pairs_distances(g);

  // Each pair becomes a bitmask of the vertices resolving it; S resolves iff it hits every mask.
  std::vector<std::uint32_t> pair_masks;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) {
      std::uint32_t m = 0;
      for (Vertex s = 0; s < n; ++s)
        if (d(s, u) != d(s, v)) m |= 1u << s;
      pair_masks.push_back(m);
    }
  auto hits_all = [&](std::uint32_t s) {
    for (auto m : pair_masks)
      if (!(m & s)) return false;
    return true;
  };

  ResolvingSetReport rep;
  rep.required = required;
  const std::uint32_t forced = required ? (1u << *required) : 0u;
  std::vector<int> pick;
  for (int k = 0; k <= n; ++k) {
    // combinations of k vertices in lexicographic order
    pick.resize(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      std::uint32_t s = 0;
      for (int x : pick) s |= 1u << x;
      if ((s & forced) == forced && hits_all(s)) {
        rep.size = k;
        rep.witness.assign(pick.begin(), pick.end());
        return rep;
      }
      int i = k - 1;
      while (i >= 0 && pick[i] == n - k + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  throw std::logic_error("no resolving set found");  // V itself always resolves
}

}  // namespace mdim
