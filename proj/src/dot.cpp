#include "edgeroles/dot.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace edgeroles {

namespace {

constexpr std::array<const char*, kDotPaletteSize> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
};

constexpr const char* kInactiveColor = "#d3d3d3";

const char* role_color(int role, bool* cycled) {
  if (role < 0) return kInactiveColor;
  if (role >= kDotPaletteSize && cycled != nullptr) *cycled = true;
  return kPalette[static_cast<std::size_t>(role) % kPalette.size()];
}

}  // namespace

std::string export_dot(const Graph& g, const std::vector<int>& edge_roles,
                       const std::vector<int>& node_roles,
                       bool* palette_cycled) {
  if (edge_roles.size() != g.edge_count())
    throw std::invalid_argument("export_dot: one role per edge required, got " +
                                std::to_string(edge_roles.size()) + " for " +
                                std::to_string(g.edge_count()) + " edges");
  if (node_roles.size() != g.vertex_count())
    throw std::invalid_argument("export_dot: one role per vertex required, got " +
                                std::to_string(node_roles.size()) + " for " +
                                std::to_string(g.vertex_count()) + " vertices");
  if (palette_cycled != nullptr) *palette_cycled = false;

  std::string out;
  out.reserve(64 * (g.vertex_count() + g.edge_count()) + 64);
  out += g.directed() ? "digraph roles {\n" : "graph roles {\n";
  out += "  node [style=filled];\n";
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    out += "  " + std::to_string(g.label(u));
    out += " [fillcolor=\"";
    out += role_color(node_roles[u], palette_cycled);
    out += "\"];\n";
  }
  const char* arrow = g.directed() ? " -> " : " -- ";
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    out += "  " + std::to_string(g.label(g.edge(e).src));
    out += arrow;
    out += std::to_string(g.label(g.edge(e).dst));
    out += " [color=\"";
    out += role_color(edge_roles[e], palette_cycled);
    out += "\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace edgeroles
