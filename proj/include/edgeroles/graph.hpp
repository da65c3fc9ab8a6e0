#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace edgeroles {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct LoadOptions {
  bool directed = false;
};

// Side channel for non-fatal load events.
struct LoadStats {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_merged = 0;
  std::vector<std::string> warnings;
};

struct Symmetrized;

// Static graph with CSR adjacency and per-vertex incident edge ids.
// Vertices are dense internal ids [0, n); original ids are kept as labels.
// Undirected edges are stored once with src < dst.
class Graph {
 public:
  Graph() = default;

  // Builds a graph from an edge list. Self-loops are dropped and duplicate
  // edges merged (weights summed, earliest timestamp kept); both are counted
  // in `stats` when provided. `weights`/`timestamps` must be empty or have
  // one entry per input edge. `vertex_count` forces n beyond the max
  // endpoint, which matters for snapshots that must share a vertex set.
  static Graph from_edges(std::vector<Edge> edges, bool directed = false,
                          std::vector<double> weights = {},
                          std::vector<std::int64_t> timestamps = {},
                          std::optional<std::size_t> vertex_count = std::nullopt,
                          LoadStats* stats = nullptr);

  std::size_t vertex_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return edges_.size(); }
  bool directed() const { return directed_; }
  bool has_weights() const { return !weights_.empty(); }
  bool has_timestamps() const { return !timestamps_.empty(); }

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }
  double weight(EdgeId e) const { return weights_.empty() ? 1.0 : weights_[e]; }
  std::int64_t timestamp(EdgeId e) const { return timestamps_[e]; }
  const std::vector<std::int64_t>& timestamps() const { return timestamps_; }

  std::size_t degree(VertexId u) const { return offsets_[u + 1] - offsets_[u]; }
  // Sorted ascending. For undirected graphs this is the full neighborhood;
  // for directed graphs it is out-neighbors only.
  std::span<const VertexId> neighbors(VertexId u) const {
    return {nbrs_.data() + offsets_[u], nbrs_.data() + offsets_[u + 1]};
  }
  // Edge ids aligned with neighbors(u).
  std::span<const EdgeId> incident_edges(VertexId u) const {
    return {inc_.data() + offsets_[u], inc_.data() + offsets_[u + 1]};
  }

  // Original vertex ids, indexed by internal id.
  const std::vector<std::int64_t>& labels() const { return labels_; }
  std::int64_t label(VertexId u) const { return labels_[u]; }

  // Undirected view of a directed graph; parallel arcs collapse to one edge.
  Symmetrized symmetrized() const;

 private:
  friend Graph make_graph_with_labels(std::vector<Edge>, bool, std::vector<double>,
                                      std::vector<std::int64_t>, std::size_t,
                                      std::vector<std::int64_t>, LoadStats*);
  void build_adjacency();

  bool directed_ = false;
  std::vector<Edge> edges_;
  std::vector<double> weights_;         // empty when unweighted
  std::vector<std::int64_t> timestamps_;  // empty when untimed
  std::vector<std::int64_t> labels_;
  std::vector<std::size_t> offsets_;  // n+1
  std::vector<VertexId> nbrs_;
  std::vector<EdgeId> inc_;
};

struct Symmetrized {
  Graph graph;
  // original edge id -> id in the symmetrized graph
  std::vector<EdgeId> edge_map;
};

// Parses whitespace-separated "src dst [weight] [timestamp]" lines. Lines
// starting with '#' or '%' and blank lines are skipped. Column meaning is
// fixed by the first data line; later lines with a different column count are
// an error. Vertex ids may be arbitrary integers and are remapped to dense
// ids in ascending label order.
Graph load_edgelist(const std::string& path, const LoadOptions& opts = {},
                    LoadStats* stats = nullptr);

// Inverse of load_edgelist up to canonical ordering: writes one edge per
// line with whatever optional columns the graph carries.
void write_edgelist(const Graph& g, const std::string& path);

// Consecutive half-open time windows [start + t*width, start + (t+1)*width).
class SnapshotSeries {
 public:
  std::size_t size() const { return snaps_.size(); }
  const Graph& snapshot(std::size_t t) const { return snaps_[t]; }
  std::int64_t start() const { return start_; }
  std::int64_t width() const { return width_; }

 private:
  friend SnapshotSeries snapshots(const Graph&, std::int64_t, std::int64_t);
  std::vector<Graph> snaps_;
  std::int64_t start_ = 0;
  std::int64_t width_ = 1;
};

// Splits a timestamped graph into window graphs. All snapshots share the
// parent's vertex set and labels. Edges before `start` are discarded; the
// series ends at the last window containing an edge, and interior empty
// windows are kept.
SnapshotSeries snapshots(const Graph& g, std::int64_t width, std::int64_t start = 0);

// Union of the first k snapshots with duplicates merged.
Graph union_window(const SnapshotSeries& series, std::size_t k);

}  // namespace edgeroles
