#pragma once

#include <string>
#include <vector>

#include "edgeroles/graph.hpp"

namespace edgeroles {

// Colors assigned to role ids 0..11; higher ids wrap around.
inline constexpr int kDotPaletteSize = 12;

// Renders the graph in DOT with one palette color per role: edges take a
// `color`, nodes a `fillcolor`. Role -1 (inactivity) renders light gray and
// never triggers palette cycling. When a role id wraps past the palette,
// *palette_cycled is set so callers can warn.
std::string export_dot(const Graph& g, const std::vector<int>& edge_roles,
                       const std::vector<int>& node_roles,
                       bool* palette_cycled = nullptr);

}  // namespace edgeroles
