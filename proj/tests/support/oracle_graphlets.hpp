#pragma once

// Reference graphlet counter: enumerates every 3- and 4-vertex subset,
// classifies the induced subgraph by degree sequence, and tallies orbit
// counts per edge and per node. Cubic/quartic in n, for cross-checking only.

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "edgeroles/graph.hpp"
#include "edgeroles/graphlets.hpp"

namespace testutil {

class OracleCounter {
 public:
  explicit OracleCounter(const edgeroles::Graph& g) : g_(g) {
    using edgeroles::Edge;
    const auto n = static_cast<Eigen::Index>(g.vertex_count());
    const auto m = static_cast<Eigen::Index>(g.edge_count());
    edge_.setZero(m, 9);
    node_.setZero(n, 14);
    adj_.assign(g.vertex_count() * g.vertex_count(), 0);
    for (const Edge& e : g.edges()) {
      adj_[e.src * g.vertex_count() + e.dst] = 1;
      adj_[e.dst * g.vertex_count() + e.src] = 1;
    }
    run3();
    run4();
  }

  const edgeroles::CountMatrix& edge_counts() const { return edge_; }
  const edgeroles::CountMatrix& node_counts() const { return node_; }

 private:
  bool adj(std::uint32_t a, std::uint32_t b) const {
    return adj_[a * g_.vertex_count() + b] != 0;
  }

  edgeroles::EdgeId edge_id(std::uint32_t a, std::uint32_t b) const {
    if (a > b) std::swap(a, b);
    const edgeroles::Edge key{a, b};
    auto es = g_.edges();
    auto it = std::lower_bound(es.begin(), es.end(), key,
                               [](const edgeroles::Edge& x, const edgeroles::Edge& y) {
                                 return x.src != y.src ? x.src < y.src : x.dst < y.dst;
                               });
    return static_cast<edgeroles::EdgeId>(it - es.begin());
  }

  void bump_edge(std::uint32_t a, std::uint32_t b, int col) { edge_(edge_id(a, b), col) += 1; }

  void run3() {
    const auto n = static_cast<std::uint32_t>(g_.vertex_count());
    for (std::uint32_t x = 0; x < n; ++x)
      for (std::uint32_t y = x + 1; y < n; ++y)
        for (std::uint32_t z = y + 1; z < n; ++z) {
          const int e1 = adj(x, y), e2 = adj(x, z), e3 = adj(y, z);
          const int cnt = e1 + e2 + e3;
          if (cnt == 3) {
            bump_edge(x, y, 0);
            bump_edge(x, z, 0);
            bump_edge(y, z, 0);
            node_(x, 0) += 1;
            node_(y, 0) += 1;
            node_(z, 0) += 1;
          } else if (cnt == 2) {
            // center is the vertex on both edges
            std::uint32_t center, l1, l2;
            if (!e1) center = z, l1 = x, l2 = y;
            else if (!e2) center = y, l1 = x, l2 = z;
            else center = x, l1 = y, l2 = z;
            for (std::uint32_t leaf : {l1, l2}) {
              std::uint32_t lo = std::min(center, leaf), hi = std::max(center, leaf);
              bump_edge(lo, hi, center == lo ? 1 : 2);
            }
            node_(center, 1) += 1;
            node_(l1, 2) += 1;
            node_(l2, 2) += 1;
          }
        }
  }

  void run4() {
    const auto n = static_cast<std::uint32_t>(g_.vertex_count());
    std::array<std::uint32_t, 4> vs{};
    for (vs[0] = 0; vs[0] < n; ++vs[0])
      for (vs[1] = vs[0] + 1; vs[1] < n; ++vs[1])
        for (vs[2] = vs[1] + 1; vs[2] < n; ++vs[2])
          for (vs[3] = vs[2] + 1; vs[3] < n; ++vs[3]) classify4(vs);
  }

  void classify4(const std::array<std::uint32_t, 4>& vs) {
    std::array<int, 4> deg{};
    std::vector<std::pair<std::uint32_t, std::uint32_t>> present;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (adj(vs[i], vs[j])) {
          ++deg[i];
          ++deg[j];
          present.emplace_back(vs[i], vs[j]);
        }
    const int cnt = static_cast<int>(present.size());
    if (cnt < 3) return;
    const int dmax = *std::max_element(deg.begin(), deg.end());
    const int dmin = *std::min_element(deg.begin(), deg.end());
    if (cnt == 3 && dmin == 0) return;  // triangle plus isolated vertex

    if (cnt == 6) {
      for (auto [a, b] : present) bump_edge(a, b, 3);
      for (int i = 0; i < 4; ++i) node_(vs[i], 3) += 1;
    } else if (cnt == 5) {
      for (auto [a, b] : present) bump_edge(a, b, 4);
      for (int i = 0; i < 4; ++i) node_(vs[i], deg[i] == 3 ? 4 : 5) += 1;
    } else if (cnt == 4 && dmax == 2) {
      for (auto [a, b] : present) bump_edge(a, b, 5);
      for (int i = 0; i < 4; ++i) node_(vs[i], 6) += 1;
    } else if (cnt == 4) {
      // triangle with a pendant edge
      for (auto [a, b] : present) bump_edge(a, b, 6);
      for (int i = 0; i < 4; ++i) {
        int col = deg[i] == 3 ? 7 : (deg[i] == 1 ? 9 : 8);
        node_(vs[i], col) += 1;
      }
    } else if (dmax == 3) {
      for (auto [a, b] : present) bump_edge(a, b, 7);
      for (int i = 0; i < 4; ++i) node_(vs[i], deg[i] == 3 ? 10 : 11) += 1;
    } else {
      for (auto [a, b] : present) bump_edge(a, b, 8);
      for (int i = 0; i < 4; ++i) node_(vs[i], deg[i] == 2 ? 12 : 13) += 1;
    }
  }

  const edgeroles::Graph& g_;
  std::vector<std::uint8_t> adj_;
  edgeroles::CountMatrix edge_;
  edgeroles::CountMatrix node_;
};

}  // namespace testutil
