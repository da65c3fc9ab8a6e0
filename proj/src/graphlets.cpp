#include "edgeroles/graphlets.hpp"

#include <stdexcept>
#include <vector>

namespace edgeroles {

namespace {

// Orbit-resolved per-edge classes. The public 9 columns collapse these; the
// node counts need the by-endpoint resolution.
enum ResolvedClass {
  kTri = 0,
  kWedgeU,      // third vertex adjacent to u only (center u)
  kWedgeV,
  kK4,
  kChord,       // chordal 4-cycle, e is the chord
  kRimU,        // chordal 4-cycle, e is a rim edge, hub at u
  kRimV,
  kC4,
  kJTriU,       // tailed triangle, e in the triangle, tail hangs off u
  kJTriV,
  kBase,        // tailed triangle, e in the triangle, tail off the third vertex
  kTailJU,      // tailed triangle, e is the tail, junction at u
  kTailJV,
  kStarU,       // 3-star centered at u
  kStarV,
  kP4Mid,
  kEndU,        // 4-path, e is an end edge, u is the outer endpoint
  kEndV,
  kNumClasses
};

using ResolvedRow = std::array<std::int64_t, kNumClasses>;

std::vector<ResolvedRow> count_resolved(const Graph& g) {
  const std::size_t m = g.edge_count();
  const std::size_t n = g.vertex_count();
  std::vector<ResolvedRow> rows(m);

#pragma omp parallel
  {
    // vertex roles relative to the current edge:
    // 0 unrelated, 1 common neighbor, 2 u-only, 3 v-only, 4 endpoint
    std::vector<std::uint8_t> type(n, 0);
    std::vector<VertexId> tri, su, sv;

#pragma omp for schedule(dynamic, 64)
    for (std::int64_t ei = 0; ei < static_cast<std::int64_t>(m); ++ei) {
      const EdgeId e = static_cast<EdgeId>(ei);
      const VertexId u = g.edge(e).src, v = g.edge(e).dst;
      type[u] = type[v] = 4;
      for (VertexId w : g.neighbors(u))
        if (w != v) type[w] = 2;
      for (VertexId w : g.neighbors(v)) {
        if (w == u) continue;
        type[w] = type[w] == 2 ? 1 : 3;
      }
      tri.clear();
      su.clear();
      sv.clear();
      for (VertexId w : g.neighbors(u)) {
        if (type[w] == 1) tri.push_back(w);
        else if (type[w] == 2) su.push_back(w);
      }
      for (VertexId w : g.neighbors(v))
        if (type[w] == 3) sv.push_back(w);

      const std::int64_t t = static_cast<std::int64_t>(tri.size());
      const std::int64_t a = static_cast<std::int64_t>(su.size());
      const std::int64_t b = static_cast<std::int64_t>(sv.size());

      std::int64_t k4x2 = 0, rim_u = 0, rim_v = 0, base = 0;
      for (VertexId w : tri) {
        std::int64_t c = 0, au = 0, av = 0;
        for (VertexId x : g.neighbors(w)) {
          if (type[x] == 1) ++c;
          else if (type[x] == 2) ++au;
          else if (type[x] == 3) ++av;
        }
        k4x2 += c;
        rim_u += au;
        rim_v += av;
        base += static_cast<std::int64_t>(g.degree(w)) - 2 - c - au - av;
      }
      std::int64_t puu2 = 0, cyc = 0, ext_u = 0, pvv2 = 0, ext_v = 0;
      for (VertexId w : su) {
        std::int64_t ct = 0, cu = 0, cv = 0;
        for (VertexId x : g.neighbors(w)) {
          if (type[x] == 1) ++ct;
          else if (type[x] == 2) ++cu;
          else if (type[x] == 3) ++cv;
        }
        puu2 += cu;
        cyc += cv;
        ext_u += static_cast<std::int64_t>(g.degree(w)) - 1 - ct - cu - cv;
      }
      for (VertexId w : sv) {
        std::int64_t ct = 0, cu = 0, cv = 0;
        for (VertexId x : g.neighbors(w)) {
          if (type[x] == 1) ++ct;
          else if (type[x] == 2) ++cu;  // these pairs are the cycles counted above
          else if (type[x] == 3) ++cv;
        }
        pvv2 += cv;
        ext_v += static_cast<std::int64_t>(g.degree(w)) - 1 - ct - cu - cv;
      }

      ResolvedRow& r = rows[e];
      r[kTri] = t;
      r[kWedgeU] = a;
      r[kWedgeV] = b;
      r[kK4] = k4x2 / 2;
      r[kChord] = t * (t - 1) / 2 - r[kK4];
      r[kRimU] = rim_u;
      r[kRimV] = rim_v;
      r[kC4] = cyc;
      r[kJTriU] = t * a - rim_u;
      r[kJTriV] = t * b - rim_v;
      r[kBase] = base;
      r[kTailJU] = puu2 / 2;
      r[kTailJV] = pvv2 / 2;
      r[kStarU] = a * (a - 1) / 2 - puu2 / 2;
      r[kStarV] = b * (b - 1) / 2 - pvv2 / 2;
      r[kP4Mid] = a * b - cyc;
      r[kEndU] = ext_v;  // paths extend from v's side, u dangles
      r[kEndV] = ext_u;

      type[u] = type[v] = 0;
      for (VertexId w : g.neighbors(u)) type[w] = 0;
      for (VertexId w : g.neighbors(v)) type[w] = 0;
    }
  }
  return rows;
}

GraphletProfile collapse(const Graph& g, const std::vector<ResolvedRow>& rows) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  GraphletProfile p;
  p.edge_counts.setZero(m, 9);
  p.node_counts.setZero(n, 14);
  for (Eigen::Index e = 0; e < m; ++e) {
    const ResolvedRow& r = rows[e];
    p.edge_counts(e, 0) = r[kTri];
    p.edge_counts(e, 1) = r[kWedgeU];
    p.edge_counts(e, 2) = r[kWedgeV];
    p.edge_counts(e, 3) = r[kK4];
    p.edge_counts(e, 4) = r[kChord] + r[kRimU] + r[kRimV];
    p.edge_counts(e, 5) = r[kC4];
    p.edge_counts(e, 6) = r[kJTriU] + r[kJTriV] + r[kBase] + r[kTailJU] + r[kTailJV];
    p.edge_counts(e, 7) = r[kStarU] + r[kStarV];
    p.edge_counts(e, 8) = r[kP4Mid] + r[kEndU] + r[kEndV];

    const auto u = static_cast<Eigen::Index>(g.edge(static_cast<EdgeId>(e)).src);
    const auto v = static_cast<Eigen::Index>(g.edge(static_cast<EdgeId>(e)).dst);
    p.node_counts(u, 0) += r[kTri];
    p.node_counts(v, 0) += r[kTri];
    p.node_counts(u, 1) += r[kWedgeU];
    p.node_counts(v, 1) += r[kWedgeV];
    p.node_counts(u, 2) += r[kWedgeV];
    p.node_counts(v, 2) += r[kWedgeU];
    p.node_counts(u, 3) += r[kK4];
    p.node_counts(v, 3) += r[kK4];
    p.node_counts(u, 4) += r[kChord];
    p.node_counts(v, 4) += r[kChord];
    p.node_counts(u, 5) += r[kRimV];
    p.node_counts(v, 5) += r[kRimU];
    p.node_counts(u, 6) += r[kC4];
    p.node_counts(v, 6) += r[kC4];
    p.node_counts(u, 7) += r[kTailJU];
    p.node_counts(v, 7) += r[kTailJV];
    p.node_counts(u, 8) += r[kBase];
    p.node_counts(v, 8) += r[kBase];
    p.node_counts(u, 9) += r[kTailJV];
    p.node_counts(v, 9) += r[kTailJU];
    p.node_counts(u, 10) += r[kStarU];
    p.node_counts(v, 10) += r[kStarV];
    p.node_counts(u, 11) += r[kStarV];
    p.node_counts(v, 11) += r[kStarU];
    p.node_counts(u, 12) += r[kP4Mid];
    p.node_counts(v, 12) += r[kP4Mid];
    p.node_counts(u, 13) += r[kEndU];
    p.node_counts(v, 13) += r[kEndV];
  }
  // orbits touched by several incident edges of the same instance
  p.node_counts.col(0) /= 2;   // triangle
  p.node_counts.col(1) /= 2;   // wedge center
  p.node_counts.col(3) /= 3;   // 4-clique
  p.node_counts.col(5) /= 2;   // chordal rim
  p.node_counts.col(6) /= 2;   // 4-cycle
  p.node_counts.col(10) /= 3;  // star center
  return p;
}

}  // namespace

GraphletProfile graphlet_profile(const Graph& g, const GraphletOptions& opts) {
  if (!g.directed()) return collapse(g, count_resolved(g));
  if (!opts.symmetrize_directed)
    throw std::logic_error(
        "graphlet counts are defined on undirected graphs; enable symmetrize_directed");
  Symmetrized sym = g.symmetrized();
  std::vector<ResolvedRow> rows = count_resolved(sym.graph);
  GraphletProfile und = collapse(sym.graph, rows);
  GraphletProfile out;
  out.node_counts = std::move(und.node_counts);
  out.edge_counts.setZero(static_cast<Eigen::Index>(g.edge_count()), 9);
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    out.edge_counts.row(e) = und.edge_counts.row(sym.edge_map[e]);
  return out;
}

CountMatrix edge_graphlets(const Graph& g, const GraphletOptions& opts) {
  return graphlet_profile(g, opts).edge_counts;
}

CountMatrix node_graphlets(const Graph& g, const GraphletOptions& opts) {
  return graphlet_profile(g, opts).node_counts;
}

}  // namespace edgeroles
