#include "edgeroles/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "edgeroles/graphlets.hpp"

namespace edgeroles {

namespace {

constexpr double kSigmaFloor = 1e-12;

// edge -> neighboring edge ids, CSR layout
struct NbrCsr {
  std::vector<std::size_t> off;
  std::vector<EdgeId> ids;

  std::span<const EdgeId> operator[](std::size_t i) const {
    return {ids.data() + off[i], ids.data() + off[i + 1]};
  }
};

std::vector<EdgeId> one_hop(const Graph& g, EdgeId e) {
  const Edge& ed = g.edge(e);
  std::vector<EdgeId> out;
  out.reserve(g.degree(ed.src) + g.degree(ed.dst));
  for (EdgeId x : g.incident_edges(ed.src))
    if (x != e) out.push_back(x);
  for (EdgeId x : g.incident_edges(ed.dst))
    if (x != e) out.push_back(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

NbrCsr build_neighborhoods(const Graph& g, int hops) {
  const std::size_t m = g.edge_count();
  std::vector<std::vector<EdgeId>> lists(m);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t e = 0; e < static_cast<std::int64_t>(m); ++e)
    lists[e] = edge_neighbors(g, static_cast<EdgeId>(e), hops);
  NbrCsr csr;
  csr.off.resize(m + 1, 0);
  for (std::size_t e = 0; e < m; ++e) csr.off[e + 1] = csr.off[e] + lists[e].size();
  csr.ids.resize(csr.off.back());
  for (std::size_t e = 0; e < m; ++e)
    std::copy(lists[e].begin(), lists[e].end(), csr.ids.begin() + csr.off[e]);
  return csr;
}

double column_stddev(const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  const double mean = v.mean();
  const double var = (v.array() - mean).square().sum() / static_cast<double>(v.size());
  return std::sqrt(std::max(var, 0.0));
}

Eigen::VectorXd apply_over(const Eigen::VectorXd& vals, const NbrCsr& nb, Op op) {
  const auto m = vals.size();
  Eigen::VectorXd out(m);
  const double sigma = std::max(column_stddev(vals), kSigmaFloor);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) {
    auto nbrs = nb[static_cast<std::size_t>(i)];
    const auto k = static_cast<double>(nbrs.size());
    if (nbrs.empty()) {
      out[i] = 0.0;
      continue;
    }
    const double xi = vals[i];
    double acc = 0.0;
    switch (op) {
      case Op::kMean:
      case Op::kSum:
        for (EdgeId j : nbrs) acc += vals[j];
        out[i] = op == Op::kMean ? acc / k : acc;
        break;
      case Op::kProduct: {
        double prod = 1.0;
        for (EdgeId j : nbrs) prod *= vals[j];
        out[i] = prod;
        break;
      }
      case Op::kMin: {
        double mn = vals[nbrs[0]];
        for (EdgeId j : nbrs) mn = std::min(mn, vals[j]);
        out[i] = mn;
        break;
      }
      case Op::kMax: {
        double mx = vals[nbrs[0]];
        for (EdgeId j : nbrs) mx = std::max(mx, vals[j]);
        out[i] = mx;
        break;
      }
      case Op::kVariance: {
        double s = 0.0, s2 = 0.0;
        for (EdgeId j : nbrs) {
          s += vals[j];
          s2 += vals[j] * vals[j];
        }
        out[i] = std::max(s2 / k - (s / k) * (s / k), 0.0);
        break;
      }
      case Op::kL1:
        for (EdgeId j : nbrs) acc += std::abs(vals[j]);
        out[i] = acc;
        break;
      case Op::kL2:
        for (EdgeId j : nbrs) acc += vals[j] * vals[j];
        out[i] = std::sqrt(acc);
        break;
      case Op::kRbf:
        for (EdgeId j : nbrs) {
          const double d = xi - vals[j];
          acc += std::exp(-d * d * inv2s2);
        }
        out[i] = std::max(acc / k, 0.0);
        break;
      case Op::kPoly:
        for (EdgeId j : nbrs) {
          const double p = xi * vals[j];
          acc += p * p;
        }
        out[i] = std::max(acc / k, 0.0);
        break;
      case Op::kSigmoid:
        for (EdgeId j : nbrs) acc += std::tanh(xi * vals[j]);
        out[i] = std::max(acc / k, 0.0);
        break;
    }
  }
  return out;
}

Eigen::VectorXd rescaled(const Eigen::VectorXd& v) {
  const double mx = v.size() ? v.maxCoeff() : 0.0;
  if (mx > 0.0) return v / mx;
  return v;
}

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

const char* op_name(Op op) {
  switch (op) {
    case Op::kMean: return "mean";
    case Op::kSum: return "sum";
    case Op::kProduct: return "product";
    case Op::kMin: return "min";
    case Op::kMax: return "max";
    case Op::kVariance: return "variance";
    case Op::kL1: return "l1";
    case Op::kL2: return "l2";
    case Op::kRbf: return "rbf";
    case Op::kPoly: return "poly";
    case Op::kSigmoid: return "sigmoid";
  }
  return "?";
}

Op op_from_name(const std::string& name) {
  for (Op op : all_ops())
    if (name == op_name(op)) return op;
  throw std::invalid_argument("unknown operator: " + name);
}

std::vector<Op> all_ops() {
  return {Op::kMean, Op::kSum,      Op::kProduct, Op::kMin, Op::kMax, Op::kVariance,
          Op::kL1,   Op::kL2,       Op::kRbf,     Op::kPoly, Op::kSigmoid};
}

std::vector<Op> aggregate_ops() {
  return {Op::kMean, Op::kSum, Op::kProduct, Op::kMin,
          Op::kMax,  Op::kVariance, Op::kL1,  Op::kL2};
}

std::string FeatureDef::name(const std::vector<FeatureDef>& all) const {
  if (base) return kEdgeOrbitNames[orbit];
  std::string inner = parent >= 0 && parent < static_cast<int>(all.size())
                          ? all[parent].name(all)
                          : "?";
  std::string label = op_name(op);
  if (hops > 1) label += "@" + std::to_string(hops);
  return label + "(" + inner + ")";
}

double FeatureMatrix::density() const {
  if (X.size() == 0) return 0.0;
  std::int64_t nnz = 0;
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      if (X(i, j) != 0.0) ++nnz;
  return static_cast<double>(nnz) / static_cast<double>(X.size());
}

std::vector<EdgeId> edge_neighbors(const Graph& g, EdgeId e, int hops) {
  if (e >= g.edge_count()) throw std::out_of_range("edge id out of range");
  if (hops < 1) throw std::invalid_argument("hops must be >= 1");
  std::vector<EdgeId> frontier = one_hop(g, e);
  if (hops == 1) return frontier;
  std::vector<char> seen(g.edge_count(), 0);
  seen[e] = 1;
  std::vector<EdgeId> result;
  for (EdgeId x : frontier) {
    seen[x] = 1;
    result.push_back(x);
  }
  for (int h = 1; h < hops && !frontier.empty(); ++h) {
    std::vector<EdgeId> next;
    for (EdgeId x : frontier)
      for (EdgeId y : one_hop(g, x))
        if (!seen[y]) {
          seen[y] = 1;
          next.push_back(y);
          result.push_back(y);
        }
    frontier = std::move(next);
  }
  std::sort(result.begin(), result.end());
  return result;
}

Eigen::VectorXd apply_operator(const Eigen::MatrixXd& X, int col, Op op, const Graph& g,
                               int hops) {
  if (col < 0 || col >= X.cols()) throw std::out_of_range("feature column out of range");
  if (static_cast<std::size_t>(X.rows()) != g.edge_count())
    throw std::invalid_argument("feature matrix rows must match edge count");
  NbrCsr nb = build_neighborhoods(g, hops);
  return apply_over(X.col(col), nb, op);
}

std::vector<int> log_bin(const Eigen::VectorXd& values, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0,1]");
  const auto m = static_cast<std::size_t>(values.size());
  std::vector<int> bins(m, 0);
  if (m == 0) return bins;
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return values[a] != values[b] ? values[a] < values[b] : a < b;
  });
  std::size_t pos = 0;
  int k = 0;
  const double am = alpha * static_cast<double>(m);
  double shrink = 1.0;
  while (pos < m) {
    auto take = static_cast<std::size_t>(std::ceil(am * shrink));
    take = std::clamp<std::size_t>(take, 1, m - pos);
    std::size_t end = pos + take;
    while (end < m && values[idx[end]] == values[idx[end - 1]]) ++end;  // ties share a bin
    for (std::size_t i = pos; i < end; ++i) bins[idx[i]] = k;
    pos = end;
    ++k;
    shrink *= 1.0 - alpha;
  }
  return bins;
}

double disagreement(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("bin vectors differ in length");
  if (a.empty()) return 0.0;
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i];
  return static_cast<double>(diff) / static_cast<double>(a.size());
}

FeatureGraph build_feature_graph(const std::vector<std::vector<int>>& bins) {
  const auto f = static_cast<Eigen::Index>(bins.size());
  FeatureGraph fg;
  fg.W = Eigen::MatrixXd::Identity(f, f);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < f; ++i)
    for (Eigen::Index j = i + 1; j < f; ++j) {
      const double w = 1.0 - disagreement(bins[i], bins[j]);
      fg.W(i, j) = w;
      fg.W(j, i) = w;
    }
  return fg;
}

std::vector<int> prune(const FeatureGraph& fg, double gamma, const std::vector<int>& layer_of,
                       const std::vector<char>& keep) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0,1]");
  const auto f = static_cast<int>(fg.W.rows());
  if (static_cast<int>(layer_of.size()) != f)
    throw std::invalid_argument("layer_of size must match feature count");

  DisjointSet ds(f);
  for (int i = 0; i < f; ++i)
    for (int j = i + 1; j < f; ++j)
      if (fg.W(i, j) >= gamma) ds.unite(i, j);

  std::vector<int> best(f, -1);
  for (int i = 0; i < f; ++i) {
    const int root = ds.find(i);
    int& b = best[root];
    if (b < 0 || std::pair(layer_of[i], i) < std::pair(layer_of[b], b)) b = i;
  }

  std::vector<int> out;
  for (int i = 0; i < f; ++i) {
    const bool kept_earlier = i < static_cast<int>(keep.size()) && keep[i];
    if (kept_earlier || best[ds.find(i)] == i) out.push_back(i);
  }
  return out;
}

double threshold_for_layer(const LearnConfig& cfg, int layer) {
  // strictest at the base layer, loosening toward a cap well below the
  // near-duplicate range. The schedule never decreases, so a column admitted
  // at layer l stays separated from every older column by more than any later
  // threshold: no surviving pair can reach the final threshold and no
  // representative is ever displaced by a newcomer.
  const double cap = 1.0 - 3.0 * cfg.eps;
  const double value = 1.0 - cfg.eps * (cfg.max_layers - layer);
  return std::clamp(value, 0.5, std::max(0.5, cap));
}

LearnResult learn_features(const Graph& g, const FeatureMatrix& x0, const LearnConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0))
    throw std::invalid_argument("alpha must be in (0,1]");
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw std::invalid_argument("eps must be in (0,1)");
  if (cfg.max_layers < 0) throw std::invalid_argument("max_layers must be >= 0");
  if (static_cast<std::size_t>(x0.X.rows()) != g.edge_count())
    throw std::invalid_argument("x0 rows must match edge count");

  const NbrCsr nb = build_neighborhoods(g, cfg.hops);

  std::vector<Eigen::VectorXd> cols;
  std::vector<FeatureDef> defs;
  std::vector<int> layers;
  std::vector<std::vector<int>> bins;

  // pruning drops columns, so derived defs in x0 could lose their parents
  for (const FeatureDef& d : x0.defs)
    if (!d.base) throw std::invalid_argument("x0 must contain base feature definitions only");

  // initial columns: drop constants, then collapse exact duplicates
  {
    for (Eigen::Index j = 0; j < x0.X.cols(); ++j) {
      std::vector<int> b = log_bin(x0.X.col(j), cfg.alpha);
      if (x0.X.rows() > 0 && *std::max_element(b.begin(), b.end()) == 0) continue;
      cols.push_back(x0.X.col(j));
      defs.push_back(j < static_cast<Eigen::Index>(x0.defs.size()) ? x0.defs[j]
                                                                   : FeatureDef{});
      layers.push_back(0);
      bins.push_back(std::move(b));
    }
    FeatureGraph fg = build_feature_graph(bins);
    std::vector<int> survivors = prune(fg, threshold_for_layer(cfg, 0), layers);
    std::vector<Eigen::VectorXd> c2;
    std::vector<FeatureDef> d2;
    std::vector<std::vector<int>> b2;
    for (int id : survivors) {
      c2.push_back(std::move(cols[id]));
      d2.push_back(defs[id]);
      b2.push_back(std::move(bins[id]));
    }
    cols = std::move(c2);
    defs = std::move(d2);
    bins = std::move(b2);
    layers.assign(cols.size(), 0);
  }

  LearnResult res;
  res.gamma_per_layer.push_back(threshold_for_layer(cfg, 0));
  {
    std::vector<int> reps0(cols.size());
    std::iota(reps0.begin(), reps0.end(), 0);
    res.reps_per_layer.push_back(std::move(reps0));
  }

  std::vector<int> newest = res.reps_per_layer.back();
  for (int layer = 1; layer <= cfg.max_layers && !newest.empty(); ++layer) {
    const double gamma = threshold_for_layer(cfg, layer);

    struct Candidate {
      Eigen::VectorXd values;
      FeatureDef def;
      std::vector<int> bins;
    };
    std::vector<Candidate> cands;
    for (int p : newest) {
      const Eigen::VectorXd scaled = rescaled(cols[p]);
      for (Op op : cfg.ops) {
        Candidate c;
        c.values = apply_over(scaled, nb, op);
        c.bins = log_bin(c.values, cfg.alpha);
        if (!c.bins.empty() && *std::max_element(c.bins.begin(), c.bins.end()) == 0)
          continue;  // constant column
        c.def = FeatureDef{false, 0, op, p, cfg.hops};
        cands.push_back(std::move(c));
      }
    }
    if (cands.empty()) break;

    const auto f_old = static_cast<int>(cols.size());
    std::vector<std::vector<int>> all_bins = bins;
    std::vector<int> all_layers = layers;
    std::vector<char> keep(f_old + cands.size(), 0);
    std::fill(keep.begin(), keep.begin() + f_old, 1);
    for (const Candidate& c : cands) {
      all_bins.push_back(c.bins);
      all_layers.push_back(layer);
    }

    FeatureGraph fg = build_feature_graph(all_bins);
    std::vector<int> survivors = prune(fg, gamma, all_layers, keep);

    std::vector<int> added;
    for (int id : survivors) {
      if (id < f_old) continue;
      Candidate& c = cands[id - f_old];
      added.push_back(static_cast<int>(cols.size()));
      cols.push_back(std::move(c.values));
      defs.push_back(c.def);
      layers.push_back(layer);
      bins.push_back(std::move(c.bins));
    }
    res.gamma_per_layer.push_back(gamma);
    res.reps_per_layer.push_back(added);
    if (added.empty()) break;
    newest = res.reps_per_layer.back();
  }

  // stored features are the log-binned values, not the raw aggregates: the
  // binned form is what keeps the matrix sparse (bin 0 covers the small-value
  // mass) and it is scale-free across graphs, which frozen-definition
  // inference relies on. Raw columns only live inside the layer search, where
  // operators consume them.
  FeatureMatrix fm;
  fm.X.resize(static_cast<Eigen::Index>(g.edge_count()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const std::vector<int>& b = bins[j];
    for (std::size_t i = 0; i < b.size(); ++i)
      fm.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = b[i];
  }
  fm.defs = std::move(defs);
  fm.layer_of = layers;
  res.features = std::move(fm);
  res.layers = layers.empty() ? 0 : *std::max_element(layers.begin(), layers.end()) + 1;
  return res;
}

Eigen::MatrixXd materialize(const Graph& g, const std::vector<FeatureDef>& defs,
                            double bin_alpha) {
  if (!(bin_alpha > 0.0 && bin_alpha <= 1.0))
    throw std::invalid_argument("bin_alpha must be in (0,1]");
  const auto m = static_cast<Eigen::Index>(g.edge_count());
  Eigen::MatrixXd out(m, static_cast<Eigen::Index>(defs.size()));
  bool have_counts = false;
  CountMatrix counts;
  std::vector<std::pair<int, NbrCsr>> nbr_cache;
  auto neighborhoods = [&](int hops) -> const NbrCsr& {
    for (auto& [h, csr] : nbr_cache)
      if (h == hops) return csr;
    nbr_cache.emplace_back(hops, build_neighborhoods(g, hops));
    return nbr_cache.back().second;
  };
  for (std::size_t j = 0; j < defs.size(); ++j) {
    const FeatureDef& d = defs[j];
    if (d.base) {
      if (!have_counts) {
        counts = edge_graphlets(g);
        have_counts = true;
      }
      if (d.orbit < 0 || d.orbit >= counts.cols())
        throw std::invalid_argument("orbit index out of range");
      out.col(static_cast<Eigen::Index>(j)) = counts.col(d.orbit).cast<double>();
    } else {
      if (d.parent < 0 || d.parent >= static_cast<int>(j))
        throw std::invalid_argument("derived feature parent must precede it");
      const Eigen::VectorXd scaled = rescaled(out.col(d.parent));
      out.col(static_cast<Eigen::Index>(j)) = apply_over(scaled, neighborhoods(d.hops), d.op);
    }
  }
  // same storage transform as learn_features: raw values drive the recursion
  // above, binned values are what the definitions evaluate to
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    std::vector<int> b = log_bin(out.col(j), bin_alpha);
    for (Eigen::Index i = 0; i < m; ++i) out(i, j) = b[static_cast<std::size_t>(i)];
  }
  return out;
}

FeatureMatrix base_edge_features(const Graph& g) {
  FeatureMatrix fm;
  fm.X = edge_graphlets(g).cast<double>();
  for (int j = 0; j < 9; ++j) {
    fm.defs.push_back(FeatureDef{true, j, Op::kMean, -1, 1});
    fm.layer_of.push_back(0);
  }
  return fm;
}

Eigen::MatrixXd node_to_edge_features(const Eigen::MatrixXd& z, const Graph& g, CombineOp op) {
  if (static_cast<std::size_t>(z.rows()) != g.vertex_count())
    throw std::invalid_argument("node feature rows must match vertex count");
  const auto m = static_cast<Eigen::Index>(g.edge_count());
  Eigen::MatrixXd out(m, z.cols());
  for (Eigen::Index e = 0; e < m; ++e) {
    const auto u = static_cast<Eigen::Index>(g.edge(static_cast<EdgeId>(e)).src);
    const auto v = static_cast<Eigen::Index>(g.edge(static_cast<EdgeId>(e)).dst);
    switch (op) {
      case CombineOp::kSum: out.row(e) = z.row(u) + z.row(v); break;
      case CombineOp::kMean: out.row(e) = (z.row(u) + z.row(v)) / 2.0; break;
      case CombineOp::kMax: out.row(e) = z.row(u).cwiseMax(z.row(v)); break;
      case CombineOp::kMin: out.row(e) = z.row(u).cwiseMin(z.row(v)); break;
      case CombineOp::kProduct: out.row(e) = z.row(u).cwiseProduct(z.row(v)); break;
      case CombineOp::kAbsDiff: out.row(e) = (z.row(u) - z.row(v)).cwiseAbs(); break;
    }
  }
  return out;
}

}  // namespace edgeroles
