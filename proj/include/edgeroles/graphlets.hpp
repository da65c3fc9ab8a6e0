#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>

#include "edgeroles/graph.hpp"

namespace edgeroles {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Connected 3- and 4-vertex patterns counted per edge. A pattern instance is
// an induced subgraph containing both endpoints; the two wedge columns are
// split by which endpoint is the center.
inline constexpr std::array<const char*, 9> kEdgeOrbitNames = {
    "triangle",     "wedge_at_u",      "wedge_at_v",
    "clique4",      "chordal_cycle4",  "cycle4",
    "tailed_triangle", "star3",        "path4",
};

// Per-node orbit counts for the same patterns, split by the node's position.
inline constexpr std::array<const char*, 14> kNodeOrbitNames = {
    "triangle",       "wedge_center",  "wedge_end",    "clique4",
    "chordal_hub",    "chordal_rim",   "cycle4",       "tailed_junction",
    "tailed_pair",    "tailed_tail",   "star_center",  "star_leaf",
    "path_mid",       "path_end",
};

struct GraphletProfile {
  CountMatrix edge_counts;  // m x 9, rows aligned with edge ids
  CountMatrix node_counts;  // n x 14, rows aligned with vertex ids
};

struct GraphletOptions {
  // Directed inputs are rejected unless this is set, in which case counts are
  // taken on the symmetrized graph and edge rows follow the original arcs.
  bool symmetrize_directed = false;
};

// Counts both per-edge and per-node orbits in one pass.
GraphletProfile graphlet_profile(const Graph& g, const GraphletOptions& opts = {});

CountMatrix edge_graphlets(const Graph& g, const GraphletOptions& opts = {});
CountMatrix node_graphlets(const Graph& g, const GraphletOptions& opts = {});

}  // namespace edgeroles
