// roles: command-line front end over the edgeroles library.
//
// Subcommands: graphlets, features, fit, select, dynamic, pipeline,
// export-dot. Every run writes its resolved configuration to config.json in
// the output directory, writes all artifacts atomically (temp file + rename)
// and prints a one-line summary to stdout. Failures print "error: ..." to
// stderr and exit nonzero.

#include <CLI11.hpp>
#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "edgeroles/dot.hpp"
#include "edgeroles/dynamic.hpp"
#include "edgeroles/factorize.hpp"
#include "edgeroles/features.hpp"
#include "edgeroles/graph.hpp"
#include "edgeroles/graphlets.hpp"
#include "edgeroles/mdl.hpp"

namespace er = edgeroles;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// formatting and file plumbing

// Shortest representation that round-trips a double, so identical runs give
// identical bytes.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

struct Summary {
  std::optional<std::size_t> f;
  std::optional<int> layers;
  std::optional<double> rho;
  std::optional<int> r_star;
  std::optional<double> total_bits;
};

void print_summary(const Summary& s, double wall_seconds) {
  std::cout << "summary:"
            << " f=" << (s.f ? std::to_string(*s.f) : "-")
            << " L=" << (s.layers ? std::to_string(*s.layers) : "-")
            << " rho=" << (s.rho ? fmt(*s.rho) : "-")
            << " r_star=" << (s.r_star ? std::to_string(*s.r_star) : "-")
            << " total_bits=" << (s.total_bits ? fmt(*s.total_bits) : "-")
            << " wall=" << fmt_fixed3(wall_seconds) << "s\n";
}

// ---------------------------------------------------------------------------
// options

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = leave the runtime default (all cores)
  std::string out_dir = "roles_out";
  bool sparse = false;
};

struct InputOpts {
  std::string path;
  bool directed = false;
};

struct FeatureOpts {
  double alpha = 0.5;
  double eps = 0.1;
  int max_layers = 4;
  std::string ops;  // comma-separated operator names; empty = all
  int hops = 1;
};

struct FitOpts {
  int rank = 3;
  std::string div = "fro";
  int sweeps = 200;
  double tol = 1e-6;
};

struct SelectOpts {
  int r_min = 1;
  int r_max = 8;
};

struct DynamicOpts {
  std::int64_t window = 0;
  std::int64_t start = 0;
  int train_k = 0;  // 0 = half the series, at least one snapshot
  std::vector<std::int64_t> timescales;
  double drift_factor = 2.0;
  int ts_rank = 3;
};

er::LearnConfig make_learn_config(const FeatureOpts& fo, const GlobalOpts& go) {
  er::LearnConfig cfg;
  cfg.alpha = fo.alpha;
  cfg.eps = fo.eps;
  cfg.max_layers = fo.max_layers;
  cfg.hops = fo.hops;
  cfg.seed = go.seed;
  if (!fo.ops.empty()) {
    cfg.ops.clear();
    std::stringstream ss(fo.ops);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) cfg.ops.push_back(er::op_from_name(tok));
    if (cfg.ops.empty()) throw std::invalid_argument("--ops lists no operators");
  }
  return cfg;
}

er::FitConfig make_fit_config(const FitOpts& fo, const GlobalOpts& go) {
  er::FitConfig cfg;
  cfg.max_sweeps = fo.sweeps;
  cfg.rel_tol = fo.tol;
  cfg.seed = go.seed;
  return cfg;
}

json config_json(const std::string& subcommand, const GlobalOpts& go) {
  json j;
  j["subcommand"] = subcommand;
  j["out"] = go.out_dir;
  j["seed"] = go.seed;
  j["threads"] = go.threads;
  j["sparse"] = go.sparse;
  return j;
}

void add_input_config(json& j, const InputOpts& in) {
  j["input"] = in.path;
  j["directed"] = in.directed;
}

void add_feature_config(json& j, const er::LearnConfig& cfg) {
  j["alpha"] = cfg.alpha;
  j["eps"] = cfg.eps;
  j["max_layers"] = cfg.max_layers;
  j["hops"] = cfg.hops;
  json ops = json::array();
  for (er::Op op : cfg.ops) ops.push_back(er::op_name(op));
  j["ops"] = ops;
}

void add_fit_config(json& j, const FitOpts& fo) {
  j["div"] = fo.div;
  j["sweeps"] = fo.sweeps;
  j["tol"] = fo.tol;
}

void write_config(const fs::path& dir, const json& j) {
  atomic_write(dir / "config.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// graph loading

er::Graph load_input(const InputOpts& in) {
  er::LoadStats stats;
  er::LoadOptions opts;
  opts.directed = in.directed;
  er::Graph g = er::load_edgelist(in.path, opts, &stats);
  for (const std::string& w : stats.warnings) std::cerr << "warning: " << w << "\n";
  return g;
}

// Roles and features are defined on undirected structure; directed inputs are
// collapsed to their undirected support for everything except plain graphlet
// counting (which keeps per-arc rows via symmetrization).
er::Graph undirected_view(const er::Graph& g) {
  if (!g.directed()) return g;
  std::cerr << "warning: directed input symmetrized for role analysis\n";
  return g.symmetrized().graph;
}

// ---------------------------------------------------------------------------
// CSV builders

template <typename Matrix>
std::string edge_matrix_csv(const er::Graph& g, const std::vector<std::string>& cols,
                            const Matrix& m) {
  std::string out = "edge,src,dst";
  for (const std::string& c : cols) out += "," + c;
  out += "\n";
  for (er::EdgeId e = 0; e < g.edge_count(); ++e) {
    out += std::to_string(e);
    out += "," + std::to_string(g.label(g.edge(e).src));
    out += "," + std::to_string(g.label(g.edge(e).dst));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out += ",";
      if constexpr (std::is_same_v<typename Matrix::Scalar, double>)
        out += fmt(m(static_cast<Eigen::Index>(e), j));
      else
        out += std::to_string(m(static_cast<Eigen::Index>(e), j));
    }
    out += "\n";
  }
  return out;
}

template <typename Matrix>
std::string node_matrix_csv(const er::Graph& g, const std::vector<std::string>& cols,
                            const Matrix& m) {
  std::string out = "node";
  for (const std::string& c : cols) out += "," + c;
  out += "\n";
  for (er::VertexId u = 0; u < g.vertex_count(); ++u) {
    out += std::to_string(g.label(u));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out += ",";
      if constexpr (std::is_same_v<typename Matrix::Scalar, double>)
        out += fmt(m(static_cast<Eigen::Index>(u), j));
      else
        out += std::to_string(m(static_cast<Eigen::Index>(u), j));
    }
    out += "\n";
  }
  return out;
}

std::string sparse_triplet_csv(const Eigen::MatrixXd& X) {
  std::string out = "row,col,value\n";
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      if (X(i, j) != 0.0)
        out += std::to_string(i) + "," + std::to_string(j) + "," + fmt(X(i, j)) + "\n";
  return out;
}

std::vector<std::string> feature_names(const std::vector<er::FeatureDef>& defs) {
  std::vector<std::string> names;
  names.reserve(defs.size());
  for (const er::FeatureDef& d : defs) names.push_back(d.name(defs));
  return names;
}

std::vector<std::string> role_col_names(int rank) {
  std::vector<std::string> names;
  for (int k = 0; k < rank; ++k) names.push_back("role_" + std::to_string(k));
  return names;
}

std::string factor_v_csv(const std::vector<std::string>& feature_labels,
                         const Eigen::MatrixXd& V) {
  std::string out = "feature,name";
  for (int k = 0; k < V.cols(); ++k) out += ",role_" + std::to_string(k);
  out += "\n";
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    out += std::to_string(i) + "," + feature_labels[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < V.cols(); ++k) out += "," + fmt(V(i, k));
    out += "\n";
  }
  return out;
}

std::string loss_csv(const std::vector<double>& trace) {
  std::string out = "sweep,loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    out += std::to_string(i) + "," + fmt(trace[i]) + "\n";
  return out;
}

std::string mdl_csv(const er::MdlReport& report) {
  std::string out = "r,model_bits,error_bits,total_bits,seconds\n";
  for (const er::MdlRecord& rec : report.records) {
    out += std::to_string(rec.rank);
    out += "," + fmt(rec.model_bits);
    out += "," + fmt(rec.error_bits);
    out += "," + fmt(rec.total_bits);
    out += "," + fmt_fixed3(rec.fit_seconds);
    out += "\n";
  }
  return out;
}

json defs_json(const std::vector<er::FeatureDef>& defs, const std::vector<int>& layer_of) {
  json arr = json::array();
  for (std::size_t j = 0; j < defs.size(); ++j) {
    const er::FeatureDef& d = defs[j];
    json item;
    item["col"] = j;
    item["name"] = d.name(defs);
    if (!layer_of.empty()) item["layer"] = layer_of[j];
    item["base"] = d.base;
    if (d.base) {
      item["orbit"] = d.orbit;
    } else {
      item["op"] = er::op_name(d.op);
      item["parent"] = d.parent;
      item["hops"] = d.hops;
    }
    arr.push_back(item);
  }
  return arr;
}

// ---------------------------------------------------------------------------
// shared pipeline stages

struct FeatureStage {
  er::Graph graph;  // undirected analysis graph
  er::LearnResult learned;
};

FeatureStage run_feature_stage(const er::Graph& g, const er::LearnConfig& cfg) {
  FeatureStage stage;
  stage.graph = undirected_view(g);
  stage.learned = er::learn_features(stage.graph, er::base_edge_features(stage.graph), cfg);
  return stage;
}

void write_feature_outputs(const fs::path& dir, const FeatureStage& stage, bool sparse) {
  const er::FeatureMatrix& fm = stage.learned.features;
  if (sparse)
    atomic_write(dir / "features.csv", sparse_triplet_csv(fm.X));
  else
    atomic_write(dir / "features.csv", edge_matrix_csv(stage.graph, feature_names(fm.defs), fm.X));

  json sidecar;
  sidecar["features"] = defs_json(fm.defs, fm.layer_of);
  sidecar["layers"] = stage.learned.layers;
  sidecar["gamma_per_layer"] = stage.learned.gamma_per_layer;
  sidecar["representatives_per_layer"] = stage.learned.reps_per_layer;
  atomic_write(dir / "feature_defs.json", sidecar.dump(2) + "\n");
}

std::string entity_name(const er::Graph& g, er::VertexId u, er::VertexId v) {
  return std::to_string(g.label(u)) + "-" + std::to_string(g.label(v));
}

// Headered CSV whose last column is an integer role label; returns roles in
// row order.
std::vector<int> read_role_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open role file " + path);
  std::vector<int> roles;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::size_t pos = line.find_last_of(',');
    std::string field = pos == std::string::npos ? line : line.substr(pos + 1);
    try {
      roles.push_back(std::stoi(field));
    } catch (const std::exception&) {
      throw std::runtime_error("bad role value '" + field + "' in " + path);
    }
  }
  return roles;
}

void write_dot(const fs::path& dir, const er::Graph& g, const std::vector<int>& edge_roles,
               const std::vector<int>& node_roles) {
  bool cycled = false;
  std::string dot = er::export_dot(g, edge_roles, node_roles, &cycled);
  if (cycled)
    std::cerr << "warning: more than " << er::kDotPaletteSize
              << " roles; palette colors repeat\n";
  atomic_write(dir / "roles.dot", dot);
}

double density_of_counts(const er::CountMatrix& m) {
  if (m.size() == 0) return 0.0;
  std::int64_t nnz = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0) ++nnz;
  return static_cast<double>(nnz) / static_cast<double>(m.size());
}

// ---------------------------------------------------------------------------
// subcommand bodies: each returns the summary it wants printed

Summary run_graphlets(const fs::path& dir, const InputOpts& in, const GlobalOpts&) {
  er::Graph g = load_input(in);
  er::GraphletOptions opts;
  opts.symmetrize_directed = g.directed();
  er::GraphletProfile profile = er::graphlet_profile(g, opts);

  std::vector<std::string> edge_cols(er::kEdgeOrbitNames.begin(), er::kEdgeOrbitNames.end());
  std::vector<std::string> node_cols(er::kNodeOrbitNames.begin(), er::kNodeOrbitNames.end());
  atomic_write(dir / "edge_graphlets.csv", edge_matrix_csv(g, edge_cols, profile.edge_counts));
  atomic_write(dir / "node_graphlets.csv", node_matrix_csv(g, node_cols, profile.node_counts));

  Summary s;
  s.f = static_cast<std::size_t>(profile.edge_counts.cols());
  s.rho = density_of_counts(profile.edge_counts);
  return s;
}

Summary run_features(const fs::path& dir, const InputOpts& in, const GlobalOpts& go,
                     const er::LearnConfig& cfg) {
  FeatureStage stage = run_feature_stage(load_input(in), cfg);
  write_feature_outputs(dir, stage, go.sparse);

  Summary s;
  s.f = static_cast<std::size_t>(stage.learned.features.X.cols());
  s.layers = stage.learned.layers;
  s.rho = stage.learned.features.density();
  return s;
}

Summary run_fit(const fs::path& dir, const InputOpts& in, const GlobalOpts& go,
                const er::LearnConfig& lcfg, const FitOpts& fo) {
  FeatureStage stage = run_feature_stage(load_input(in), lcfg);
  const er::FeatureMatrix& fm = stage.learned.features;
  er::Divergence div = er::divergence_from_name(fo.div);
  er::RoleModel model = er::fit(fm.X, fo.rank, div, make_fit_config(fo, go));

  atomic_write(dir / "U.csv",
               edge_matrix_csv(stage.graph, role_col_names(model.rank), model.U));
  atomic_write(dir / "V.csv", factor_v_csv(feature_names(fm.defs), model.V));
  atomic_write(dir / "loss.csv", loss_csv(model.loss_trace));
  write_feature_outputs(dir, stage, go.sparse);

  Summary s;
  s.f = static_cast<std::size_t>(fm.X.cols());
  s.layers = stage.learned.layers;
  s.rho = fm.density();
  s.r_star = model.rank;
  return s;
}

Summary run_select(const fs::path& dir, const InputOpts& in, const GlobalOpts& go,
                   const er::LearnConfig& lcfg, const FitOpts& fo, const SelectOpts& so) {
  FeatureStage stage = run_feature_stage(load_input(in), lcfg);
  const Eigen::MatrixXd& X = stage.learned.features.X;
  er::Divergence div = er::divergence_from_name(fo.div);

  int cap = static_cast<int>(std::min(X.rows(), X.cols()));
  int r_hi = std::min(so.r_max, cap);
  int r_lo = std::min(so.r_min, r_hi);
  if (r_hi < so.r_max)
    std::cerr << "warning: rank sweep capped at " << r_hi << " by the matrix shape\n";
  er::MdlReport report = er::select_rank(X, r_lo, r_hi, div, make_fit_config(fo, go));

  atomic_write(dir / "mdl.csv", mdl_csv(report));
  write_feature_outputs(dir, stage, go.sparse);

  Summary s;
  s.f = static_cast<std::size_t>(X.cols());
  s.layers = stage.learned.layers;
  s.rho = stage.learned.features.density();
  s.r_star = report.best_rank;
  for (const er::MdlRecord& rec : report.records)
    if (rec.rank == report.best_rank) s.total_bits = rec.total_bits;
  return s;
}

Summary run_dynamic(const fs::path& dir, const InputOpts& in, const GlobalOpts& go,
                    const er::LearnConfig& lcfg, const FitOpts& fo, const SelectOpts& so,
                    const DynamicOpts& dy) {
  er::Graph g = undirected_view(load_input(in));

  er::TrainOptions opt;
  opt.features = lcfg;
  opt.fit = make_fit_config(fo, go);
  opt.r_min = so.r_min;
  opt.r_max = so.r_max;
  opt.divergence = er::divergence_from_name(fo.div);

  std::int64_t width = dy.window;
  if (dy.timescales.size() >= 2) {
    width = er::learn_timescale(g, dy.timescales, opt, dy.ts_rank);
    std::cout << "learned timescale: width=" << width << "\n";
  } else if (dy.timescales.size() == 1) {
    width = dy.timescales[0];
  }
  if (width <= 0)
    throw std::invalid_argument("snapshot width required: pass --window or --timescales");

  er::SnapshotSeries series = er::snapshots(g, width, dy.start);
  int train_k = dy.train_k;
  if (train_k <= 0) train_k = std::max<int>(1, static_cast<int>(series.size()) / 2);

  er::RoleDefinitions defs = er::train_definitions(series, train_k, opt);
  er::RoleSeries rs = er::infer_series(series, defs, opt.fit);
  er::EntropySeries es = er::entropy_rank(rs);

  json sidecar;
  sidecar["features"] = defs_json(defs.defs, {});
  sidecar["rank"] = defs.rank;
  sidecar["train_k"] = defs.train_k;
  sidecar["feature_layers"] = defs.feature_layers;
  sidecar["divergence"] = er::divergence_name(defs.divergence);
  sidecar["baseline_loss"] = defs.baseline_loss;
  sidecar["window"] = width;
  sidecar["start"] = dy.start;
  atomic_write(dir / "role_defs.json", sidecar.dump(2) + "\n");
  atomic_write(dir / "V.csv", factor_v_csv(feature_names(defs.defs), defs.V));
  atomic_write(dir / "mdl.csv", mdl_csv(defs.rank_report));

  const std::size_t T = rs.memberships.size();
  for (std::size_t t = 0; t < T; ++t) {
    std::string out = "entity,src,dst";
    for (int k = 0; k < rs.rank; ++k) out += ",role_" + std::to_string(k);
    out += "\n";
    const Eigen::MatrixXd& U = rs.memberships[t];
    for (std::size_t i = 0; i < rs.entities.size(); ++i) {
      auto [u, v] = rs.entities[i];
      out += entity_name(g, u, v);
      out += "," + std::to_string(g.label(u)) + "," + std::to_string(g.label(v));
      for (int k = 0; k < rs.rank; ++k)
        out += "," + fmt(U(static_cast<Eigen::Index>(i), k));
      out += "\n";
    }
    atomic_write(dir / ("memberships_t" + std::to_string(t) + ".csv"), out);
  }

  std::string entropy_out = "entity,d,argmax_t,argmin_t\n";
  for (const er::EntropyRecord& rec : es.ranked) {
    auto [u, v] = rs.entities[rec.entity];
    entropy_out += entity_name(g, u, v);
    entropy_out += "," + fmt(rec.d);
    entropy_out += "," + std::to_string(rec.argmax_t);
    entropy_out += "," + std::to_string(rec.argmin_t);
    entropy_out += "\n";
  }
  atomic_write(dir / "entropy.csv", entropy_out);

  std::string series_out = "entity,t,role,weight\n";
  for (std::size_t t = 0; t < T; ++t) {
    const Eigen::MatrixXd& U = rs.memberships[t];
    for (std::size_t i = 0; i < rs.entities.size(); ++i) {
      if (U.row(static_cast<Eigen::Index>(i)).sum() <= 0.0) continue;
      auto [u, v] = rs.entities[i];
      for (int k = 0; k < rs.rank; ++k) {
        series_out += entity_name(g, u, v);
        series_out += "," + std::to_string(t);
        series_out += "," + std::to_string(k);
        series_out += "," + fmt(U(static_cast<Eigen::Index>(i), k));
        series_out += "\n";
      }
    }
  }
  atomic_write(dir / "series.csv", series_out);

  std::string drift_out = "t,mean_loss,baseline_loss,drift\n";
  for (std::size_t t = 0; t < T; ++t) {
    drift_out += std::to_string(t);
    drift_out += "," + fmt(rs.mean_loss[t]);
    drift_out += "," + fmt(rs.baseline_loss);
    drift_out += std::string(",") +
                 (er::check_drift(rs, static_cast<int>(t), dy.drift_factor) ? "1" : "0");
    drift_out += "\n";
  }
  atomic_write(dir / "drift.csv", drift_out);

  Summary s;
  s.f = defs.defs.size();
  s.layers = defs.feature_layers;
  s.r_star = defs.rank;
  for (const er::MdlRecord& rec : defs.rank_report.records)
    if (rec.rank == defs.rank) s.total_bits = rec.total_bits;
  return s;
}

Summary run_pipeline(const fs::path& dir, const InputOpts& in, const GlobalOpts& go,
                     const er::LearnConfig& lcfg, const FitOpts& fo, const SelectOpts& so) {
  er::Graph loaded = load_input(in);

  er::GraphletOptions gopts;
  gopts.symmetrize_directed = loaded.directed();
  er::GraphletProfile profile = er::graphlet_profile(loaded, gopts);
  std::vector<std::string> edge_cols(er::kEdgeOrbitNames.begin(), er::kEdgeOrbitNames.end());
  std::vector<std::string> node_cols(er::kNodeOrbitNames.begin(), er::kNodeOrbitNames.end());
  atomic_write(dir / "edge_graphlets.csv",
               edge_matrix_csv(loaded, edge_cols, profile.edge_counts));
  atomic_write(dir / "node_graphlets.csv",
               node_matrix_csv(loaded, node_cols, profile.node_counts));

  FeatureStage stage = run_feature_stage(loaded, lcfg);
  const er::Graph& g = stage.graph;
  const er::FeatureMatrix& fm = stage.learned.features;
  write_feature_outputs(dir, stage, go.sparse);

  er::Divergence div = er::divergence_from_name(fo.div);
  er::FitConfig fcfg = make_fit_config(fo, go);

  int cap = static_cast<int>(std::min(fm.X.rows(), fm.X.cols()));
  int r_hi = std::min(so.r_max, cap);
  int r_lo = std::min(so.r_min, r_hi);
  er::MdlReport report = er::select_rank(fm.X, r_lo, r_hi, div, fcfg);
  atomic_write(dir / "mdl.csv", mdl_csv(report));

  er::RoleModel model = er::fit(fm.X, report.best_rank, div, fcfg);
  atomic_write(dir / "U.csv", edge_matrix_csv(g, role_col_names(model.rank), model.U));
  atomic_write(dir / "V.csv", factor_v_csv(feature_names(fm.defs), model.V));
  atomic_write(dir / "loss.csv", loss_csv(model.loss_trace));

  std::vector<int> edge_roles = er::assign_roles(model.U);
  std::string edge_roles_out = "edge,src,dst,role\n";
  for (er::EdgeId e = 0; e < g.edge_count(); ++e) {
    edge_roles_out += std::to_string(e);
    edge_roles_out += "," + std::to_string(g.label(g.edge(e).src));
    edge_roles_out += "," + std::to_string(g.label(g.edge(e).dst));
    edge_roles_out += "," + std::to_string(edge_roles[e]);
    edge_roles_out += "\n";
  }
  atomic_write(dir / "edge_roles.csv", edge_roles_out);

  // node roles come from the node orbit profile with the same selection sweep
  Eigen::MatrixXd node_x = profile.node_counts.cast<double>();
  int node_cap = static_cast<int>(std::min(node_x.rows(), node_x.cols()));
  int nr_hi = std::min(so.r_max, node_cap);
  int nr_lo = std::min(so.r_min, nr_hi);
  er::MdlReport node_report = er::select_rank(node_x, nr_lo, nr_hi, div, fcfg);
  atomic_write(dir / "node_mdl.csv", mdl_csv(node_report));
  er::RoleModel node_model = er::fit(node_x, node_report.best_rank, div, fcfg);
  std::vector<int> node_roles = er::assign_roles(node_model.U);
  std::string node_roles_out = "node,role\n";
  for (er::VertexId u = 0; u < g.vertex_count(); ++u)
    node_roles_out += std::to_string(g.label(u)) + "," + std::to_string(node_roles[u]) + "\n";
  atomic_write(dir / "node_roles.csv", node_roles_out);

  write_dot(dir, g, edge_roles, node_roles);

  Summary s;
  s.f = static_cast<std::size_t>(fm.X.cols());
  s.layers = stage.learned.layers;
  s.rho = fm.density();
  s.r_star = report.best_rank;
  for (const er::MdlRecord& rec : report.records)
    if (rec.rank == report.best_rank) s.total_bits = rec.total_bits;
  return s;
}

Summary run_export_dot(const fs::path& dir, const InputOpts& in, const std::string& edge_csv,
                       const std::string& node_csv) {
  er::Graph g = undirected_view(load_input(in));
  std::vector<int> edge_roles = read_role_csv(edge_csv);
  std::vector<int> node_roles = read_role_csv(node_csv);
  write_dot(dir, g, edge_roles, node_roles);
  return Summary{};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"higher-order edge role discovery toolkit"};
  app.require_subcommand(1);

  GlobalOpts go;
  app.add_option("--seed", go.seed, "random seed shared by all stages");
  app.add_option("--threads", go.threads, "worker thread cap (0 = all cores)");
  app.add_option("--out", go.out_dir, "output directory");
  app.add_flag("--sparse", go.sparse, "write the feature matrix as row,col,value triplets");

  InputOpts in;
  FeatureOpts feat;
  FitOpts fitopt;
  SelectOpts selopt;
  DynamicOpts dynopt;
  std::string edge_roles_csv, node_roles_csv;

  auto add_input = [&](CLI::App* sub) {
    sub->fallthrough();  // let global flags appear after the subcommand
    sub->add_option("input", in.path, "edge list file")->required();
    sub->add_flag("--directed", in.directed, "treat the input as directed arcs");
  };
  auto add_feature_flags = [&](CLI::App* sub) {
    // frees the short -h so the hop-count flag below can use --h
    sub->set_help_flag("--help", "print this help and exit");
    sub->add_option("--alpha", feat.alpha, "log-binning fraction in (0, 1]");
    sub->add_option("--eps", feat.eps, "per-layer pruning threshold decay in (0, 1)");
    sub->add_option("--max-layers", feat.max_layers, "feature search depth");
    sub->add_option("--ops", feat.ops, "comma-separated operator subset");
    sub->add_option("--h,--hops", feat.hops, "neighborhood radius for operators");
  };
  auto add_div_flag = [&](CLI::App* sub) {
    sub->add_option("--div", fitopt.div, "divergence: fro, kl, or is");
  };
  auto add_fit_flags = [&](CLI::App* sub) {
    add_div_flag(sub);
    sub->add_option("--sweeps", fitopt.sweeps, "max coordinate-descent sweeps");
    sub->add_option("--tol", fitopt.tol, "relative loss-change stopping tolerance");
  };
  auto add_select_flags = [&](CLI::App* sub) {
    sub->add_option("--rmin", selopt.r_min, "smallest rank to try");
    sub->add_option("--rmax", selopt.r_max, "largest rank to try");
  };

  CLI::App* graphlets = app.add_subcommand("graphlets", "per-edge and per-node orbit counts");
  add_input(graphlets);

  CLI::App* features = app.add_subcommand("features", "learn a relational edge feature matrix");
  add_input(features);
  add_feature_flags(features);

  CLI::App* fit = app.add_subcommand("fit", "factorize learned features at a fixed rank");
  add_input(fit);
  add_feature_flags(fit);
  add_fit_flags(fit);
  fit->add_option("--rank", fitopt.rank, "number of roles")->required();

  CLI::App* select = app.add_subcommand("select", "sweep ranks and pick by description length");
  add_input(select);
  add_feature_flags(select);
  add_fit_flags(select);
  add_select_flags(select);

  CLI::App* dynamic = app.add_subcommand("dynamic", "role tracking over snapshot series");
  add_input(dynamic);
  add_feature_flags(dynamic);
  add_fit_flags(dynamic);
  add_select_flags(dynamic);
  dynamic->add_option("--window", dynopt.window, "snapshot width in timestamp units");
  dynamic->add_option("--start", dynopt.start, "first window start time");
  dynamic->add_option("--train-k", dynopt.train_k,
                      "snapshots in the training prefix (0 = half the series)");
  dynamic->add_option("--timescales", dynopt.timescales,
                      "candidate widths; two or more trigger timescale learning")
      ->delimiter(',');
  dynamic->add_option("--drift-factor", dynopt.drift_factor, "drift threshold over baseline loss");
  dynamic->add_option("--ts-rank", dynopt.ts_rank, "rank used while scoring candidate widths");

  CLI::App* pipeline = app.add_subcommand("pipeline", "end-to-end: counts, features, rank, roles, DOT");
  add_input(pipeline);
  add_feature_flags(pipeline);
  add_fit_flags(pipeline);
  add_select_flags(pipeline);

  CLI::App* export_dot_cmd = app.add_subcommand("export-dot", "role-colored DOT from saved labels");
  add_input(export_dot_cmd);
  export_dot_cmd->add_option("--edge-roles", edge_roles_csv, "edge role CSV (last column = role)")
      ->required();
  export_dot_cmd->add_option("--node-roles", node_roles_csv, "node role CSV (last column = role)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.get_name() << ": " << e.what() << "\n";
    return 1;
  }

  try {
#ifdef _OPENMP
    if (go.threads > 0) omp_set_num_threads(go.threads);
#endif
    fs::path dir(go.out_dir);
    fs::create_directories(dir);

    auto t0 = std::chrono::steady_clock::now();
    Summary summary;

    if (graphlets->parsed()) {
      json cfg = config_json("graphlets", go);
      add_input_config(cfg, in);
      write_config(dir, cfg);
      summary = run_graphlets(dir, in, go);
    } else if (features->parsed()) {
      er::LearnConfig lcfg = make_learn_config(feat, go);
      json cfg = config_json("features", go);
      add_input_config(cfg, in);
      add_feature_config(cfg, lcfg);
      write_config(dir, cfg);
      summary = run_features(dir, in, go, lcfg);
    } else if (fit->parsed()) {
      er::LearnConfig lcfg = make_learn_config(feat, go);
      json cfg = config_json("fit", go);
      add_input_config(cfg, in);
      add_feature_config(cfg, lcfg);
      add_fit_config(cfg, fitopt);
      cfg["rank"] = fitopt.rank;
      write_config(dir, cfg);
      summary = run_fit(dir, in, go, lcfg, fitopt);
    } else if (select->parsed()) {
      er::LearnConfig lcfg = make_learn_config(feat, go);
      json cfg = config_json("select", go);
      add_input_config(cfg, in);
      add_feature_config(cfg, lcfg);
      add_fit_config(cfg, fitopt);
      cfg["rmin"] = selopt.r_min;
      cfg["rmax"] = selopt.r_max;
      write_config(dir, cfg);
      summary = run_select(dir, in, go, lcfg, fitopt, selopt);
    } else if (dynamic->parsed()) {
      er::LearnConfig lcfg = make_learn_config(feat, go);
      json cfg = config_json("dynamic", go);
      add_input_config(cfg, in);
      add_feature_config(cfg, lcfg);
      add_fit_config(cfg, fitopt);
      cfg["rmin"] = selopt.r_min;
      cfg["rmax"] = selopt.r_max;
      cfg["window"] = dynopt.window;
      cfg["start"] = dynopt.start;
      cfg["train_k"] = dynopt.train_k;
      cfg["timescales"] = dynopt.timescales;
      cfg["drift_factor"] = dynopt.drift_factor;
      cfg["ts_rank"] = dynopt.ts_rank;
      write_config(dir, cfg);
      summary = run_dynamic(dir, in, go, lcfg, fitopt, selopt, dynopt);
    } else if (pipeline->parsed()) {
      er::LearnConfig lcfg = make_learn_config(feat, go);
      json cfg = config_json("pipeline", go);
      add_input_config(cfg, in);
      add_feature_config(cfg, lcfg);
      add_fit_config(cfg, fitopt);
      cfg["rmin"] = selopt.r_min;
      cfg["rmax"] = selopt.r_max;
      write_config(dir, cfg);
      summary = run_pipeline(dir, in, go, lcfg, fitopt, selopt);
    } else if (export_dot_cmd->parsed()) {
      json cfg = config_json("export-dot", go);
      add_input_config(cfg, in);
      cfg["edge_roles"] = edge_roles_csv;
      cfg["node_roles"] = node_roles_csv;
      write_config(dir, cfg);
      summary = run_export_dot(dir, in, edge_roles_csv, node_roles_csv);
    }

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    print_summary(summary, wall);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
