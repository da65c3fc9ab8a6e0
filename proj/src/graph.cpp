#include "edgeroles/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace edgeroles {

namespace {

struct Row {
  Edge e;
  double w;
  std::int64_t ts;
};

std::string at_line(const std::string& path, std::size_t lineno, const std::string& what) {
  return path + ": line " + std::to_string(lineno) + ": " + what;
}

}  // namespace

Graph make_graph_with_labels(std::vector<Edge> edges, bool directed,
                             std::vector<double> weights,
                             std::vector<std::int64_t> timestamps, std::size_t n,
                             std::vector<std::int64_t> labels, LoadStats* stats) {
  const bool has_w = !weights.empty();
  const bool has_t = !timestamps.empty();
  if (has_w && weights.size() != edges.size())
    throw std::invalid_argument("weight count does not match edge count");
  if (has_t && timestamps.size() != edges.size())
    throw std::invalid_argument("timestamp count does not match edge count");

  std::vector<Row> rows;
  rows.reserve(edges.size());
  std::size_t loops = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    Edge e = edges[i];
    if (e.src >= n || e.dst >= n)
      throw std::out_of_range("edge endpoint exceeds vertex count");
    if (e.src == e.dst) {
      ++loops;
      continue;
    }
    if (!directed && e.src > e.dst) std::swap(e.src, e.dst);
    rows.push_back({e, has_w ? weights[i] : 1.0, has_t ? timestamps[i] : 0});
  }
  if (loops && stats) {
    stats->self_loops_dropped += loops;
    stats->warnings.push_back("dropped " + std::to_string(loops) + " self-loop(s)");
  }

  std::sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
    if (has_t && a.ts != b.ts) return a.ts < b.ts;
    return std::tie(a.e.src, a.e.dst) < std::tie(b.e.src, b.e.dst);
  });

  // Merge duplicates: same endpoints, and same timestamp when timestamps are
  // present (the same pair at a different time is a distinct event).
  Graph g;
  g.directed_ = directed;
  std::size_t merged = 0;
  for (const Row& r : rows) {
    if (!g.edges_.empty()) {
      const Edge& last = g.edges_.back();
      if (last == r.e && (!has_t || g.timestamps_.back() == r.ts)) {
        if (has_w) g.weights_.back() += r.w;
        ++merged;
        continue;
      }
    }
    g.edges_.push_back(r.e);
    if (has_w) g.weights_.push_back(r.w);
    if (has_t) g.timestamps_.push_back(r.ts);
  }
  if (merged && stats) {
    stats->duplicates_merged += merged;
    stats->warnings.push_back("merged " + std::to_string(merged) + " duplicate edge(s)");
  }

  if (labels.empty()) {
    labels.resize(n);
    std::iota(labels.begin(), labels.end(), std::int64_t{0});
  } else if (labels.size() != n) {
    throw std::invalid_argument("label count does not match vertex count");
  }
  g.labels_ = std::move(labels);
  g.offsets_.assign(n + 1, 0);
  g.build_adjacency();
  return g;
}

Graph Graph::from_edges(std::vector<Edge> edges, bool directed,
                        std::vector<double> weights,
                        std::vector<std::int64_t> timestamps,
                        std::optional<std::size_t> vertex_count, LoadStats* stats) {
  std::size_t n = 0;
  for (const Edge& e : edges) n = std::max<std::size_t>({n, e.src + 1ull, e.dst + 1ull});
  if (vertex_count) {
    if (*vertex_count < n) throw std::out_of_range("vertex_count below max endpoint");
    n = *vertex_count;
  }
  return make_graph_with_labels(std::move(edges), directed, std::move(weights),
                                std::move(timestamps), n, {}, stats);
}

void Graph::build_adjacency() {
  const std::size_t n = offsets_.size() - 1;
  for (const Edge& e : edges_) {
    ++offsets_[e.src + 1];
    if (!directed_) ++offsets_[e.dst + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  nbrs_.resize(offsets_.back());
  inc_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const Edge& e = edges_[id];
    nbrs_[cursor[e.src]] = e.dst;
    inc_[cursor[e.src]++] = id;
    if (!directed_) {
      nbrs_[cursor[e.dst]] = e.src;
      inc_[cursor[e.dst]++] = id;
    }
  }
  std::vector<std::pair<VertexId, EdgeId>> tmp;
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t lo = offsets_[u], hi = offsets_[u + 1];
    tmp.clear();
    for (std::size_t i = lo; i < hi; ++i) tmp.emplace_back(nbrs_[i], inc_[i]);
    std::sort(tmp.begin(), tmp.end());
    for (std::size_t i = lo; i < hi; ++i) {
      nbrs_[i] = tmp[i - lo].first;
      inc_[i] = tmp[i - lo].second;
    }
  }
}

Symmetrized Graph::symmetrized() const {
  if (!directed_) {
    Symmetrized out{*this, std::vector<EdgeId>(edges_.size())};
    std::iota(out.edge_map.begin(), out.edge_map.end(), EdgeId{0});
    return out;
  }
  std::vector<Edge> canon(edges_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    Edge e = edges_[i];
    if (e.src > e.dst) std::swap(e.src, e.dst);
    canon[i] = e;
  }
  // structural view only: weights and timestamps do not survive
  Graph und = make_graph_with_labels(canon, false, {}, {}, vertex_count(), labels_, nullptr);
  Symmetrized out{std::move(und), std::vector<EdgeId>(edges_.size())};
  const auto es = out.graph.edges();
  for (std::size_t i = 0; i < canon.size(); ++i) {
    auto it = std::lower_bound(es.begin(), es.end(), canon[i],
                               [](const Edge& a, const Edge& b) {
                                 return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
                               });
    out.edge_map[i] = static_cast<EdgeId>(it - es.begin());
  }
  return out;
}

Graph load_edgelist(const std::string& path, const LoadOptions& opts, LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);

  std::vector<std::int64_t> srcs, dsts, ts;
  std::vector<double> ws;
  int ncols = 0;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv(line);
    fields.clear();
    std::size_t pos = 0;
    while (pos < sv.size()) {
      while (pos < sv.size() && std::isspace(static_cast<unsigned char>(sv[pos]))) ++pos;
      std::size_t beg = pos;
      while (pos < sv.size() && !std::isspace(static_cast<unsigned char>(sv[pos]))) ++pos;
      if (pos > beg) fields.push_back(sv.substr(beg, pos - beg));
    }
    if (fields.empty() || fields[0][0] == '#' || fields[0][0] == '%') continue;
    if (ncols == 0) {
      if (fields.size() < 2 || fields.size() > 4)
        throw std::runtime_error(at_line(path, lineno, "expected 2-4 fields"));
      ncols = static_cast<int>(fields.size());
    } else if (static_cast<int>(fields.size()) != ncols) {
      throw std::runtime_error(at_line(path, lineno, "expected " + std::to_string(ncols) +
                                                        " fields, got " +
                                                        std::to_string(fields.size())));
    }
    auto parse_int = [&](std::string_view f, const char* what) {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || p != f.data() + f.size())
        throw std::runtime_error(at_line(path, lineno, std::string("bad ") + what));
      return v;
    };
    srcs.push_back(parse_int(fields[0], "source id"));
    dsts.push_back(parse_int(fields[1], "target id"));
    if (ncols >= 3) {
      double w = 0;
      auto [p, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), w);
      if (ec != std::errc{} || p != fields[2].data() + fields[2].size())
        throw std::runtime_error(at_line(path, lineno, "bad weight"));
      if (w < 0) throw std::runtime_error(at_line(path, lineno, "negative weight"));
      ws.push_back(w);
    }
    if (ncols == 4) {
      std::int64_t t = parse_int(fields[3], "timestamp");
      if (t < 0) throw std::runtime_error(at_line(path, lineno, "negative timestamp"));
      ts.push_back(t);
    }
  }

  // remap arbitrary input ids to dense ids in ascending label order
  std::vector<std::int64_t> labels(srcs);
  labels.insert(labels.end(), dsts.begin(), dsts.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  auto dense = [&](std::int64_t v) {
    return static_cast<VertexId>(std::lower_bound(labels.begin(), labels.end(), v) -
                                 labels.begin());
  };
  std::vector<Edge> edges(srcs.size());
  for (std::size_t i = 0; i < srcs.size(); ++i) edges[i] = {dense(srcs[i]), dense(dsts[i])};
  const std::size_t n = labels.size();
  return make_graph_with_labels(std::move(edges), opts.directed, std::move(ws), std::move(ts),
                                n, std::move(labels), stats);
}

void write_edgelist(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[64];
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    out << g.label(g.edge(e).src) << ' ' << g.label(g.edge(e).dst);
    if (g.has_weights()) {
      std::snprintf(buf, sizeof(buf), "%.17g", g.weight(e));
      out << ' ' << buf;
    }
    if (g.has_timestamps()) out << ' ' << g.timestamp(e);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

SnapshotSeries snapshots(const Graph& g, std::int64_t width, std::int64_t start) {
  if (!g.has_timestamps()) throw std::logic_error("snapshots requires a timestamped graph");
  if (width <= 0) throw std::invalid_argument("snapshot width must be positive");

  std::int64_t last = -1;
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (g.timestamp(e) >= start) last = std::max(last, (g.timestamp(e) - start) / width);
  if (last < 0) throw std::invalid_argument("no edges at or after snapshot start");
  const std::size_t T = static_cast<std::size_t>(last) + 1;

  std::vector<std::vector<Edge>> bucket_e(T);
  std::vector<std::vector<double>> bucket_w(T);
  std::vector<std::vector<std::int64_t>> bucket_t(T);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (g.timestamp(e) < start) continue;
    const auto t = static_cast<std::size_t>((g.timestamp(e) - start) / width);
    bucket_e[t].push_back(g.edge(e));
    if (g.has_weights()) bucket_w[t].push_back(g.weight(e));
    bucket_t[t].push_back(g.timestamp(e));
  }

  // a snapshot is a plain graph of its window: repeats of a pair inside one
  // window collapse to a single edge stamped with its first occurrence
  for (std::size_t t = 0; t < T; ++t) {
    auto& es = bucket_e[t];
    auto& ws = bucket_w[t];
    auto& ts = bucket_t[t];
    std::vector<std::size_t> order(es.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (es[a].src != es[b].src) return es[a].src < es[b].src;
      if (es[a].dst != es[b].dst) return es[a].dst < es[b].dst;
      return ts[a] < ts[b];
    });
    std::vector<Edge> me;
    std::vector<double> mw;
    std::vector<std::int64_t> mt;
    for (std::size_t idx : order) {
      if (!me.empty() && me.back() == es[idx]) {
        if (!ws.empty()) mw.back() += ws[idx];
        continue;
      }
      me.push_back(es[idx]);
      if (!ws.empty()) mw.push_back(ws[idx]);
      mt.push_back(ts[idx]);
    }
    es = std::move(me);
    ws = std::move(mw);
    ts = std::move(mt);
  }

  SnapshotSeries s;
  s.start_ = start;
  s.width_ = width;
  s.snaps_.reserve(T);
  for (std::size_t t = 0; t < T; ++t)
    s.snaps_.push_back(make_graph_with_labels(std::move(bucket_e[t]), g.directed(),
                                              std::move(bucket_w[t]), std::move(bucket_t[t]),
                                              g.vertex_count(), g.labels(), nullptr));
  return s;
}

Graph union_window(const SnapshotSeries& series, std::size_t k) {
  if (k < 1 || k > series.size()) throw std::out_of_range("window count out of range");
  std::vector<Edge> edges;
  std::vector<double> ws;
  const bool has_w = series.snapshot(0).has_weights();
  for (std::size_t t = 0; t < k; ++t) {
    const Graph& g = series.snapshot(t);
    edges.insert(edges.end(), g.edges().begin(), g.edges().end());
    if (has_w)
      for (EdgeId e = 0; e < g.edge_count(); ++e) ws.push_back(g.weight(e));
  }
  // dropping timestamps makes the builder merge repeats of a pair across windows
  const Graph& first = series.snapshot(0);
  return make_graph_with_labels(std::move(edges), first.directed(), std::move(ws), {},
                                first.vertex_count(), first.labels(), nullptr);
}

}  // namespace edgeroles
