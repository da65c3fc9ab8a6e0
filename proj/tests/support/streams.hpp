#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "edgeroles/graph.hpp"

namespace testutil {

// Timestamped stream with one snapshot per unit of time. The first `t_split`
// snapshots draw clique groups of mixed sizes plus a hub (triangle- and
// star-heavy); the rest scatter a similar number of edges uniformly.
inline edgeroles::Graph two_regime_stream(int n, int t_total, int t_split,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);

  // consecutive groups cycling through sizes 3,4,5,6
  const int sizes[4] = {3, 4, 5, 6};
  std::vector<std::pair<int, int>> groups;
  for (int base = 0, g = 0; base + sizes[g % 4] <= n; base += sizes[g % 4], ++g)
    groups.emplace_back(base, base + sizes[g % 4]);

  int expected = 0;
  for (auto [lo, hi] : groups) expected += (hi - lo) * (hi - lo - 1) / 2;
  const int target = expected + static_cast<int>(groups.size()) / 2;

  std::vector<edgeroles::Edge> edges;
  std::vector<std::int64_t> stamps;
  for (int t = 0; t < t_total; ++t) {
    if (t < t_split) {
      for (auto [lo, hi] : groups)
        for (int a = lo; a < hi; ++a)
          for (int b = a + 1; b < hi; ++b) {
            edges.push_back({static_cast<edgeroles::VertexId>(a),
                             static_cast<edgeroles::VertexId>(b)});
            stamps.push_back(t);
          }
      // hub spokes are deterministic so regime-one snapshots are identical:
      // no flag in the stationary regime can come from fixture noise
      for (std::size_t g = 1; g < groups.size(); ++g) {
        edges.push_back({0, static_cast<edgeroles::VertexId>(groups[g].first)});
        stamps.push_back(t);
      }
    } else {
      for (int i = 0; i < target; ++i) {
        const auto a = static_cast<edgeroles::VertexId>(rng() % n);
        const auto b = static_cast<edgeroles::VertexId>(rng() % n);
        if (a == b) continue;
        edges.push_back({a, b});
        stamps.push_back(t);
      }
    }
  }
  return edgeroles::Graph::from_edges(edges, false, {}, stamps,
                                      static_cast<std::size_t>(n));
}

}  // namespace testutil
