#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "edgeroles/dot.hpp"
#include "edgeroles/dynamic.hpp"
#include "edgeroles/factorize.hpp"
#include "edgeroles/features.hpp"
#include "edgeroles/graph.hpp"
#include "edgeroles/graphlets.hpp"
#include "edgeroles/mdl.hpp"

namespace py = pybind11;
namespace er = edgeroles;

namespace {

// The python surface trades enums for strings; these build the C++ configs
// from flat keyword arguments.
er::FitConfig make_fit_config(int max_sweeps, double rel_tol, std::uint64_t seed,
                              double eps_div, double lambda_u, double lambda_v) {
  er::FitConfig cfg;
  cfg.max_sweeps = max_sweeps;
  cfg.rel_tol = rel_tol;
  cfg.seed = seed;
  cfg.eps_div = eps_div;
  cfg.lambda_u = lambda_u;
  cfg.lambda_v = lambda_v;
  return cfg;
}

er::LearnConfig make_learn_config(double alpha, double eps, int max_layers,
                                  const std::optional<std::vector<std::string>>& ops,
                                  int hops, std::uint64_t seed) {
  er::LearnConfig cfg;
  cfg.alpha = alpha;
  cfg.eps = eps;
  cfg.max_layers = max_layers;
  if (ops) {
    cfg.ops.clear();
    for (const std::string& name : *ops) cfg.ops.push_back(er::op_from_name(name));
  }
  cfg.hops = hops;
  cfg.seed = seed;
  return cfg;
}

std::vector<std::string> op_name_list(const std::vector<er::Op>& ops) {
  std::vector<std::string> out;
  for (er::Op op : ops) out.push_back(er::op_name(op));
  return out;
}

std::vector<std::string> def_names(const std::vector<er::FeatureDef>& defs) {
  std::vector<std::string> out;
  for (const er::FeatureDef& d : defs) out.push_back(d.name(defs));
  return out;
}

void warn(const std::string& msg) {
  py::module_::import("warnings").attr("warn")(msg);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "edge role discovery: graphlet features, relational feature learning, "
            "non-negative factorization, description-length rank selection, and "
            "dynamic role tracking";

  m.attr("EDGE_ORBITS") =
      std::vector<std::string>(er::kEdgeOrbitNames.begin(), er::kEdgeOrbitNames.end());
  m.attr("NODE_ORBITS") =
      std::vector<std::string>(er::kNodeOrbitNames.begin(), er::kNodeOrbitNames.end());

  m.def("all_ops", [] { return op_name_list(er::all_ops()); },
        "names of every relational operator");
  m.def("aggregate_ops", [] { return op_name_list(er::aggregate_ops()); },
        "names of the default (aggregation-only) operator set");

  // ---- graph ----

  py::class_<er::Graph>(m, "Graph")
      .def_property_readonly("vertex_count", &er::Graph::vertex_count)
      .def_property_readonly("edge_count", &er::Graph::edge_count)
      .def_property_readonly("directed", &er::Graph::directed)
      .def_property_readonly("has_weights", &er::Graph::has_weights)
      .def_property_readonly("has_timestamps", &er::Graph::has_timestamps)
      .def_property_readonly("labels",
                             [](const er::Graph& g) { return g.labels(); },
                             "original vertex id for each internal id")
      .def("edges",
           [](const er::Graph& g) {
             std::vector<std::pair<er::VertexId, er::VertexId>> out;
             out.reserve(g.edge_count());
             for (const er::Edge& e : g.edges()) out.emplace_back(e.src, e.dst);
             return out;
           },
           "edge endpoint pairs as internal vertex ids")
      .def("weight", [](const er::Graph& g, er::EdgeId e) { return g.weight(e); },
           py::arg("edge"))
      .def("neighbors",
           [](const er::Graph& g, er::VertexId u) {
             auto sp = g.neighbors(u);
             return std::vector<er::VertexId>(sp.begin(), sp.end());
           },
           py::arg("vertex"))
      .def("degree", &er::Graph::degree, py::arg("vertex"))
      .def("__repr__", [](const er::Graph& g) {
        std::ostringstream os;
        os << "Graph(" << g.vertex_count() << " vertices, " << g.edge_count()
           << (g.directed() ? " arcs" : " edges")
           << (g.has_timestamps() ? ", timestamped" : "") << ")";
        return os.str();
      });

  m.def(
      "load_edgelist",
      [](const std::string& path, bool directed) {
        er::LoadStats stats;
        er::LoadOptions opts;
        opts.directed = directed;
        er::Graph g = er::load_edgelist(path, opts, &stats);
        for (const std::string& w : stats.warnings) warn(w);
        return g;
      },
      py::arg("path"), py::arg("directed") = false,
      "read a whitespace-separated 'src dst [weight] [timestamp]' file");

  m.def(
      "from_edges",
      [](const std::vector<std::pair<er::VertexId, er::VertexId>>& pairs, bool directed,
         std::vector<double> weights, std::vector<std::int64_t> timestamps,
         std::optional<std::size_t> vertex_count) {
        std::vector<er::Edge> edges;
        edges.reserve(pairs.size());
        for (const auto& [u, v] : pairs) edges.push_back({u, v});
        er::LoadStats stats;
        er::Graph g = er::Graph::from_edges(std::move(edges), directed, std::move(weights),
                                            std::move(timestamps), vertex_count, &stats);
        for (const std::string& w : stats.warnings) warn(w);
        return g;
      },
      py::arg("edges"), py::arg("directed") = false,
      py::arg("weights") = std::vector<double>{},
      py::arg("timestamps") = std::vector<std::int64_t>{},
      py::arg("vertex_count") = std::nullopt,
      "build a graph from (src, dst) pairs; self-loops drop, duplicates merge");

  m.def("write_edgelist", &er::write_edgelist, py::arg("graph"), py::arg("path"));

  py::class_<er::SnapshotSeries>(m, "SnapshotSeries")
      .def("__len__", &er::SnapshotSeries::size)
      .def("__getitem__",
           [](const er::SnapshotSeries& s, std::size_t t) -> const er::Graph& {
             if (t >= s.size()) throw py::index_error();
             return s.snapshot(t);
           },
           py::return_value_policy::reference_internal)
      .def_property_readonly("start", &er::SnapshotSeries::start)
      .def_property_readonly("width", &er::SnapshotSeries::width)
      .def("__repr__", [](const er::SnapshotSeries& s) {
        std::ostringstream os;
        os << "SnapshotSeries(" << s.size() << " windows of width " << s.width() << ")";
        return os.str();
      });

  m.def("snapshots", &er::snapshots, py::arg("graph"), py::arg("width"),
        py::arg("start") = 0,
        "split a timestamped graph into consecutive fixed-width windows");
  m.def("union_window", &er::union_window, py::arg("series"), py::arg("k"),
        "union of the first k snapshots with duplicates merged");

  // ---- graphlets ----

  m.def(
      "edge_graphlets",
      [](const er::Graph& g, bool symmetrize_directed) {
        er::GraphletOptions opts;
        opts.symmetrize_directed = symmetrize_directed;
        return er::edge_graphlets(g, opts);
      },
      py::arg("graph"), py::arg("symmetrize_directed") = false,
      "per-edge orbit counts, one column per entry of EDGE_ORBITS");
  m.def(
      "node_graphlets",
      [](const er::Graph& g, bool symmetrize_directed) {
        er::GraphletOptions opts;
        opts.symmetrize_directed = symmetrize_directed;
        return er::node_graphlets(g, opts);
      },
      py::arg("graph"), py::arg("symmetrize_directed") = false,
      "per-node orbit counts, one column per entry of NODE_ORBITS");

  // ---- feature learning ----

  py::class_<er::FeatureDef>(m, "FeatureDef")
      .def(py::init<>())
      .def_readwrite("base", &er::FeatureDef::base)
      .def_readwrite("orbit", &er::FeatureDef::orbit)
      .def_property(
          "op", [](const er::FeatureDef& d) { return std::string(er::op_name(d.op)); },
          [](er::FeatureDef& d, const std::string& name) { d.op = er::op_from_name(name); })
      .def_readwrite("parent", &er::FeatureDef::parent)
      .def_readwrite("hops", &er::FeatureDef::hops)
      .def("__repr__", [](const er::FeatureDef& d) {
        std::ostringstream os;
        if (d.base)
          os << "FeatureDef(orbit=" << d.orbit << ")";
        else
          os << "FeatureDef(op=" << er::op_name(d.op) << ", parent=" << d.parent
             << ", hops=" << d.hops << ")";
        return os.str();
      });

  py::class_<er::LearnResult>(m, "LearnResult")
      .def_property_readonly("X",
                             [](const er::LearnResult& r) { return r.features.X; },
                             "edges x features, log-binned values")
      .def_property_readonly("defs",
                             [](const er::LearnResult& r) { return r.features.defs; })
      .def_property_readonly("layer_of",
                             [](const er::LearnResult& r) { return r.features.layer_of; })
      .def_property_readonly("layers",
                             [](const er::LearnResult& r) { return r.layers; })
      .def_property_readonly("reps_per_layer",
                             [](const er::LearnResult& r) { return r.reps_per_layer; })
      .def_property_readonly("gamma_per_layer",
                             [](const er::LearnResult& r) { return r.gamma_per_layer; })
      .def_property_readonly("names",
                             [](const er::LearnResult& r) { return def_names(r.features.defs); },
                             "human-readable name per feature column")
      .def("density", [](const er::LearnResult& r) { return r.features.density(); },
           "exact nonzero fraction of X")
      .def("__repr__", [](const er::LearnResult& r) {
        std::ostringstream os;
        os << "LearnResult(" << r.features.X.rows() << " x " << r.features.X.cols()
           << ", " << r.layers << " layers)";
        return os.str();
      });

  m.def(
      "learn_features",
      [](const er::Graph& g, double alpha, double eps, int max_layers,
         const std::optional<std::vector<std::string>>& ops, int hops, std::uint64_t seed) {
        er::LearnConfig cfg = make_learn_config(alpha, eps, max_layers, ops, hops, seed);
        return er::learn_features(g, er::base_edge_features(g), cfg);
      },
      py::arg("graph"), py::arg("alpha") = 0.5, py::arg("eps") = 0.1,
      py::arg("max_layers") = 4, py::arg("ops") = std::nullopt, py::arg("hops") = 1,
      py::arg("seed") = 0,
      "layered relational feature search starting from the graphlet orbit columns");

  m.def(
      "materialize",
      [](const er::Graph& g, const std::vector<er::FeatureDef>& defs, double bin_alpha) {
        return er::materialize(g, defs, bin_alpha);
      },
      py::arg("graph"), py::arg("defs"), py::arg("bin_alpha") = 0.5,
      "evaluate learned feature definitions on another graph");

  m.def("base_edge_features",
        [](const er::Graph& g) { return er::base_edge_features(g).X; }, py::arg("graph"),
        "raw orbit counts as a float matrix, the layer-0 search input");

  m.def(
      "log_bin",
      [](const Eigen::VectorXd& values, double alpha) { return er::log_bin(values, alpha); },
      py::arg("values"), py::arg("alpha") = 0.5,
      "vertical logarithmic binning; equal values share a bin");
  m.def("disagreement", &er::disagreement, py::arg("a"), py::arg("b"),
        "fraction of rows whose bins differ");

  // ---- factorization ----

  py::class_<er::RoleModel>(m, "RoleModel")
      .def_readonly("U", &er::RoleModel::U)
      .def_readonly("V", &er::RoleModel::V)
      .def_readonly("rank", &er::RoleModel::rank)
      .def_property_readonly(
          "divergence",
          [](const er::RoleModel& mm) { return std::string(er::divergence_name(mm.divergence)); })
      .def_readonly("loss_trace", &er::RoleModel::loss_trace)
      .def("__repr__", [](const er::RoleModel& mm) {
        std::ostringstream os;
        os << "RoleModel(rank=" << mm.rank << ", div=" << er::divergence_name(mm.divergence)
           << ", sweeps=" << mm.loss_trace.size() << ")";
        return os.str();
      });

  m.def(
      "fit",
      [](const Eigen::MatrixXd& X, int rank, const std::string& div, int max_sweeps,
         double rel_tol, std::uint64_t seed, double eps_div, double lambda_u,
         double lambda_v) {
        return er::fit(X, rank, er::divergence_from_name(div),
                       make_fit_config(max_sweeps, rel_tol, seed, eps_div, lambda_u, lambda_v));
      },
      py::arg("X"), py::arg("rank"), py::arg("div") = "fro", py::arg("max_sweeps") = 200,
      py::arg("rel_tol") = 1e-6, py::arg("seed") = 0, py::arg("eps_div") = 1e-10,
      py::arg("lambda_u") = 0.0, py::arg("lambda_v") = 0.0,
      "non-negative factorization X ~= U V^T by coordinate descent; div is fro, kl, or is");

  m.def(
      "infer_memberships",
      [](const Eigen::MatrixXd& X_new, const Eigen::MatrixXd& V, const std::string& div,
         int max_sweeps, double rel_tol, std::uint64_t seed, double eps_div) {
        return er::infer_memberships(
            X_new, V, er::divergence_from_name(div),
            make_fit_config(max_sweeps, rel_tol, seed, eps_div, 0.0, 0.0));
      },
      py::arg("X"), py::arg("V"), py::arg("div") = "fro", py::arg("max_sweeps") = 200,
      py::arg("rel_tol") = 1e-6, py::arg("seed") = 0, py::arg("eps_div") = 1e-10,
      "solve for memberships against a frozen factor V");

  m.def(
      "bregman_loss",
      [](const Eigen::MatrixXd& X, const Eigen::MatrixXd& U, const Eigen::MatrixXd& V,
         const std::string& div, double eps_div) {
        return er::bregman_loss(X, U, V, er::divergence_from_name(div), eps_div);
      },
      py::arg("X"), py::arg("U"), py::arg("V"), py::arg("div") = "fro",
      py::arg("eps_div") = 1e-10, "sum of per-entry divergences between X and U V^T");

  m.def("assign_roles", &er::assign_roles, py::arg("U"),
        "per-row argmax labels; all-zero rows get -1");

  // ---- rank selection ----

  py::class_<er::MdlRecord>(m, "MdlRecord")
      .def_readonly("rank", &er::MdlRecord::rank)
      .def_readonly("model_bits", &er::MdlRecord::model_bits)
      .def_readonly("error_bits", &er::MdlRecord::error_bits)
      .def_readonly("total_bits", &er::MdlRecord::total_bits)
      .def_readonly("fit_seconds", &er::MdlRecord::fit_seconds)
      .def("__repr__", [](const er::MdlRecord& r) {
        std::ostringstream os;
        os << "MdlRecord(rank=" << r.rank << ", total_bits=" << r.total_bits << ")";
        return os.str();
      });

  py::class_<er::MdlReport>(m, "MdlReport")
      .def_readonly("records", &er::MdlReport::records)
      .def_readonly("best_rank", &er::MdlReport::best_rank)
      .def("__repr__", [](const er::MdlReport& r) {
        std::ostringstream os;
        os << "MdlReport(best_rank=" << r.best_rank << ", " << r.records.size() << " ranks)";
        return os.str();
      });

  m.def(
      "select_rank",
      [](const Eigen::MatrixXd& X, int r_min, int r_max, const std::string& div,
         int max_sweeps, double rel_tol, std::uint64_t seed) {
        return er::select_rank(
            X, r_min, r_max, er::divergence_from_name(div),
            make_fit_config(max_sweeps, rel_tol, seed, 1e-10, 0.0, 0.0));
      },
      py::arg("X"), py::arg("r_min"), py::arg("r_max"), py::arg("div") = "fro",
      py::arg("max_sweeps") = 200, py::arg("rel_tol") = 1e-6, py::arg("seed") = 0,
      "fit every rank in [r_min, r_max] and pick the shortest description");

  py::class_<er::Quantizer>(m, "Quantizer")
      .def_readonly("levels", &er::Quantizer::levels)
      .def_readonly("boundaries", &er::Quantizer::boundaries)
      .def_readonly("centroids", &er::Quantizer::centroids)
      .def_readonly("freq", &er::Quantizer::freq)
      .def_readonly("distortion", &er::Quantizer::distortion);

  m.def("lloyd_max", &er::lloyd_max, py::arg("values"), py::arg("levels"),
        "scalar quantizer fitted by Lloyd-Max iteration");
  m.def("quantize",
        [](const er::Quantizer& q, const std::vector<double>& values) {
          return er::quantize(q, values);
        },
        py::arg("quantizer"), py::arg("values"));

  py::class_<er::HuffmanCost>(m, "HuffmanCost")
      .def_readonly("total_bits", &er::HuffmanCost::total_bits)
      .def_readonly("mean_bits", &er::HuffmanCost::mean_bits);

  m.def("huffman_bits", &er::huffman_bits, py::arg("frequencies"),
        "optimal prefix-code cost for the given symbol counts");

  py::class_<er::ModelCost>(m, "ModelCost")
      .def_readonly("kappa", &er::ModelCost::kappa)
      .def_readonly("value_bits", &er::ModelCost::value_bits)
      .def_readonly("position_bits", &er::ModelCost::position_bits)
      .def_readonly("header_bits", &er::ModelCost::header_bits)
      .def_readonly("total", &er::ModelCost::total);

  m.def("model_bits", &er::model_bits, py::arg("U"), py::arg("V"),
        "description length of a factor pair");
  m.def(
      "error_bits",
      [](const Eigen::MatrixXd& X, const Eigen::MatrixXd& U, const Eigen::MatrixXd& V,
         const std::string& div) {
        return er::error_bits(X, U, V, er::divergence_from_name(div));
      },
      py::arg("X"), py::arg("U"), py::arg("V"), py::arg("div") = "fro",
      "description length of the data given the model");

  // ---- dynamic roles ----

  py::class_<er::RoleDefinitions>(m, "RoleDefinitions")
      .def_readonly("defs", &er::RoleDefinitions::defs)
      .def_readonly("V", &er::RoleDefinitions::V)
      .def_readonly("rank", &er::RoleDefinitions::rank)
      .def_readonly("train_k", &er::RoleDefinitions::train_k)
      .def_readonly("feature_layers", &er::RoleDefinitions::feature_layers)
      .def_readonly("bin_alpha", &er::RoleDefinitions::bin_alpha)
      .def_property_readonly("divergence",
                             [](const er::RoleDefinitions& d) {
                               return std::string(er::divergence_name(d.divergence));
                             })
      .def_readonly("baseline_loss", &er::RoleDefinitions::baseline_loss)
      .def_readonly("rank_report", &er::RoleDefinitions::rank_report)
      .def("__repr__", [](const er::RoleDefinitions& d) {
        std::ostringstream os;
        os << "RoleDefinitions(rank=" << d.rank << ", " << d.defs.size() << " features)";
        return os.str();
      });

  py::class_<er::RoleSeries>(m, "RoleSeries")
      .def_readonly("defs", &er::RoleSeries::defs)
      .def_readonly("V", &er::RoleSeries::V)
      .def_readonly("rank", &er::RoleSeries::rank)
      .def_property_readonly("divergence",
                             [](const er::RoleSeries& s) {
                               return std::string(er::divergence_name(s.divergence));
                             })
      .def_readonly("entities", &er::RoleSeries::entities)
      .def_readonly("memberships", &er::RoleSeries::memberships)
      .def_readonly("mean_loss", &er::RoleSeries::mean_loss)
      .def_readonly("baseline_loss", &er::RoleSeries::baseline_loss)
      .def("__repr__", [](const er::RoleSeries& s) {
        std::ostringstream os;
        os << "RoleSeries(" << s.entities.size() << " entities over "
           << s.memberships.size() << " snapshots)";
        return os.str();
      });

  py::class_<er::EntropyRecord>(m, "EntropyRecord")
      .def_readonly("entity", &er::EntropyRecord::entity)
      .def_readonly("d", &er::EntropyRecord::d)
      .def_readonly("argmax_t", &er::EntropyRecord::argmax_t)
      .def_readonly("argmin_t", &er::EntropyRecord::argmin_t)
      .def("__repr__", [](const er::EntropyRecord& r) {
        std::ostringstream os;
        os << "EntropyRecord(entity=" << r.entity << ", d=" << r.d << ")";
        return os.str();
      });

  py::class_<er::EntropySeries>(m, "EntropySeries")
      .def_readonly("H", &er::EntropySeries::H)
      .def_readonly("ranked", &er::EntropySeries::ranked);

  m.def(
      "train_definitions",
      [](const er::SnapshotSeries& series, int k, int r_min, int r_max,
         const std::string& div, double alpha, double eps, int max_layers,
         const std::optional<std::vector<std::string>>& ops, int hops, int max_sweeps,
         double rel_tol, std::uint64_t seed) {
        er::TrainOptions opt;
        opt.features = make_learn_config(alpha, eps, max_layers, ops, hops, seed);
        opt.fit = make_fit_config(max_sweeps, rel_tol, seed, 1e-10, 0.0, 0.0);
        opt.r_min = r_min;
        opt.r_max = r_max;
        opt.divergence = er::divergence_from_name(div);
        return er::train_definitions(series, k, opt);
      },
      py::arg("series"), py::arg("k"), py::arg("r_min") = 1, py::arg("r_max") = 8,
      py::arg("div") = "fro", py::arg("alpha") = 0.5, py::arg("eps") = 0.1,
      py::arg("max_layers") = 4, py::arg("ops") = std::nullopt, py::arg("hops") = 1,
      py::arg("max_sweeps") = 200, py::arg("rel_tol") = 1e-6, py::arg("seed") = 0,
      "learn features and role definitions on the union of the first k snapshots");

  m.def(
      "infer_series",
      [](const er::SnapshotSeries& series, const er::RoleDefinitions& defs, int max_sweeps,
         double rel_tol, std::uint64_t seed) {
        return er::infer_series(series, defs,
                                make_fit_config(max_sweeps, rel_tol, seed, 1e-10, 0.0, 0.0));
      },
      py::arg("series"), py::arg("definitions"), py::arg("max_sweeps") = 200,
      py::arg("rel_tol") = 1e-6, py::arg("seed") = 0,
      "evaluate frozen definitions on every snapshot without retraining");

  m.def("entropy_rank", &er::entropy_rank, py::arg("series"),
        "difference-entropy ranking of entities over the series");

  m.def(
      "learn_timescale",
      [](const er::Graph& g, const std::vector<std::int64_t>& widths, int rank, int r_min,
         int r_max, const std::string& div, double alpha, double eps, int max_layers,
         const std::optional<std::vector<std::string>>& ops, int hops, int max_sweeps,
         double rel_tol, std::uint64_t seed) {
        er::TrainOptions opt;
        opt.features = make_learn_config(alpha, eps, max_layers, ops, hops, seed);
        opt.fit = make_fit_config(max_sweeps, rel_tol, seed, 1e-10, 0.0, 0.0);
        opt.r_min = r_min;
        opt.r_max = r_max;
        opt.divergence = er::divergence_from_name(div);
        return er::learn_timescale(g, widths, opt, rank);
      },
      py::arg("graph"), py::arg("widths"), py::arg("rank") = 3, py::arg("r_min") = 1,
      py::arg("r_max") = 8, py::arg("div") = "fro", py::arg("alpha") = 0.5,
      py::arg("eps") = 0.1, py::arg("max_layers") = 4, py::arg("ops") = std::nullopt,
      py::arg("hops") = 1, py::arg("max_sweeps") = 200, py::arg("rel_tol") = 1e-6,
      py::arg("seed") = 0,
      "pick the snapshot width whose prefix-trained model best predicts the suffix");

  m.def("check_drift", &er::check_drift, py::arg("series"), py::arg("t"),
        py::arg("factor") = 2.0,
        "whether snapshot t reconstructs worse than factor times the baseline");

  // ---- visualization ----

  m.def(
      "export_dot",
      [](const er::Graph& g, const std::vector<int>& edge_roles,
         const std::vector<int>& node_roles) {
        bool cycled = false;
        std::string dot = er::export_dot(g, edge_roles, node_roles, &cycled);
        if (cycled)
          warn("more roles than palette colors; colors repeat across roles");
        return dot;
      },
      py::arg("graph"), py::arg("edge_roles"), py::arg("node_roles"),
      "Graphviz source with one fill/stroke color per role");
}
