#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <vector>

#include "edgeroles/features.hpp"
#include "edgeroles/graph.hpp"
#include "edgeroles/graphlets.hpp"
#include "support/test_util.hpp"

using namespace edgeroles;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("edge_neighbors shares an endpoint") {
  SUBCASE("triangle: each edge sees the other two") {
    Graph g = Graph::from_edges({{0, 1}, {1, 2}, {0, 2}});
    for (EdgeId e = 0; e < 3; ++e) CHECK(edge_neighbors(g, e).size() == 2);
  }
  SUBCASE("star with four edges: each edge sees the other three") {
    Graph g = Graph::from_edges({{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    for (EdgeId e = 0; e < 4; ++e) CHECK(edge_neighbors(g, e).size() == 3);
  }
  SUBCASE("path: middle edge sees both ends") {
    Graph g = Graph::from_edges({{0, 1}, {1, 2}, {2, 3}});
    CHECK(edge_neighbors(g, 1) == std::vector<EdgeId>{0, 2});
    CHECK(edge_neighbors(g, 0) == std::vector<EdgeId>{1});
  }
  SUBCASE("two hops reach the whole path") {
    Graph g = Graph::from_edges({{0, 1}, {1, 2}, {2, 3}});
    CHECK(edge_neighbors(g, 0, 2) == std::vector<EdgeId>{1, 2});
    CHECK(edge_neighbors(g, 0, 3) == std::vector<EdgeId>{1, 2});
  }
  SUBCASE("bad arguments") {
    Graph g = Graph::from_edges({{0, 1}});
    CHECK_THROWS_AS(edge_neighbors(g, 5), std::out_of_range);
    CHECK_THROWS_AS(edge_neighbors(g, 0, 0), std::invalid_argument);
  }
}

TEST_CASE("apply_operator aggregates neighbor values") {
  Graph g = Graph::from_edges({{0, 1}, {1, 2}, {2, 3}, {4, 5}});  // path plus isolated edge
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(4, 1);

  SUBCASE("sum of a constant column counts neighbors") {
    Eigen::VectorXd out = apply_operator(X, 0, Op::kSum, g);
    CHECK(out[0] == 1.0);
    CHECK(out[1] == 2.0);
    CHECK(out[2] == 1.0);
    CHECK(out[3] == 0.0);  // no neighbors at all
  }
  SUBCASE("max with no neighbors is zero") {
    CHECK(apply_operator(X, 0, Op::kMax, g)[3] == 0.0);
  }
  SUBCASE("variance of a constant column is zero") {
    Eigen::VectorXd out = apply_operator(X, 0, Op::kVariance, g);
    CHECK(out.maxCoeff() == 0.0);
  }
  SUBCASE("mean averages") {
    Eigen::MatrixXd Y(4, 1);
    Y << 2.0, 4.0, 8.0, 5.0;
    Eigen::VectorXd out = apply_operator(Y, 0, Op::kMean, g);
    CHECK(out[1] == doctest::Approx((2.0 + 8.0) / 2));
  }
  SUBCASE("argument checks") {
    CHECK_THROWS_AS(apply_operator(X, 3, Op::kSum, g), std::out_of_range);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 1);
    CHECK_THROWS_AS(apply_operator(bad, 0, Op::kSum, g), std::invalid_argument);
  }
}

TEST_CASE("operator names round-trip and reject unknowns") {
  for (Op op : all_ops()) CHECK(op_from_name(op_name(op)) == op);
  CHECK_THROWS_AS(op_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("log_bin splits geometrically from the small end") {
  SUBCASE("constant column lands in one bin") {
    std::vector<int> b = log_bin(Eigen::VectorXd::Constant(7, 3.0), 0.5);
    for (int x : b) CHECK(x == 0);
  }
  SUBCASE("four distinct values, alpha one half") {
    CHECK(log_bin(vec({1, 2, 4, 8}), 0.5) == std::vector<int>{0, 0, 1, 2});
  }
  SUBCASE("hundred distinct values give the documented bin sizes") {
    Eigen::VectorXd v(100);
    for (int i = 0; i < 100; ++i) v[i] = i + 1;
    std::vector<int> b = log_bin(v, 0.5);
    std::vector<int> sizes(6, 0);
    for (int x : b) {
      REQUIRE(x < 6);
      ++sizes[x];
    }
    CHECK(sizes == std::vector<int>{50, 25, 13, 7, 4, 1});
    // smallest values occupy bin 0
    CHECK(b[0] == 0);
    CHECK(b[49] == 0);
    CHECK(b[50] == 1);
    CHECK(b[99] == 5);
  }
  SUBCASE("ties never split across bins") {
    CHECK(log_bin(vec({1, 2, 2, 8}), 0.5) == std::vector<int>{0, 0, 0, 1});
    CHECK(log_bin(vec({5, 5, 5, 1}), 0.5) == std::vector<int>{0, 0, 0, 0});
  }
  SUBCASE("alpha of one collapses everything") {
    CHECK(log_bin(vec({1, 9, 4}), 1.0) == std::vector<int>{0, 0, 0});
  }
  SUBCASE("bins depend only on rank order") {
    std::mt19937_64 rng(3);
    Eigen::VectorXd v(60);
    for (int i = 0; i < 60; ++i) v[i] = static_cast<double>(rng() % 20);
    std::vector<int> base = log_bin(v, 0.4);
    CHECK(log_bin(v.array().square().matrix(), 0.4) == base);
    CHECK(log_bin(v.array().log1p().matrix(), 0.4) == base);
  }
  SUBCASE("alpha out of range") {
    CHECK_THROWS_AS(log_bin(vec({1, 2}), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(log_bin(vec({1, 2}), 1.5), std::invalid_argument);
  }
}

TEST_CASE("disagreement is the differing-row fraction") {
  CHECK(disagreement({0, 1, 2}, {0, 1, 2}) == 0.0);
  CHECK(disagreement({0, 0, 0}, {1, 1, 1}) == 1.0);
  CHECK(disagreement({0, 0, 1, 1}, {0, 1, 1, 1}) == 0.25);
  CHECK_THROWS_AS(disagreement({0, 1}, {0}), std::invalid_argument);
}

TEST_CASE("prune keeps one representative per component") {
  auto make_fg = [](std::initializer_list<std::tuple<int, int, double>> edges, int f) {
    FeatureGraph fg;
    fg.W = Eigen::MatrixXd::Identity(f, f);
    for (auto [i, j, w] : edges) {
      fg.W(i, j) = w;
      fg.W(j, i) = w;
    }
    return fg;
  };

  SUBCASE("no edges above threshold: everything survives") {
    FeatureGraph fg = make_fg({{0, 1, 0.3}, {1, 2, 0.5}}, 3);
    CHECK(prune(fg, 0.8, {0, 0, 0}) == std::vector<int>{0, 1, 2});
  }
  SUBCASE("identical pair: the earlier layer wins") {
    FeatureGraph fg = make_fg({{0, 1, 1.0}}, 2);
    CHECK(prune(fg, 0.9, {0, 1}) == std::vector<int>{0});
    CHECK(prune(fg, 0.9, {1, 0}) == std::vector<int>{1});
  }
  SUBCASE("same layer: the smaller id wins") {
    FeatureGraph fg = make_fg({{0, 1, 1.0}}, 2);
    CHECK(prune(fg, 0.9, {0, 0}) == std::vector<int>{0});
  }
  SUBCASE("chains collapse to a single survivor") {
    FeatureGraph fg = make_fg({{0, 1, 0.9}, {1, 2, 0.9}}, 3);
    CHECK(prune(fg, 0.8, {0, 0, 0}) == std::vector<int>{0});
  }
  SUBCASE("earlier representatives are never dropped") {
    FeatureGraph fg = make_fg({{0, 1, 0.9}, {1, 2, 0.9}}, 3);
    CHECK(prune(fg, 0.8, {0, 0, 1}, {1, 1, 0}) == std::vector<int>{0, 1});
  }
  SUBCASE("threshold validation") {
    FeatureGraph fg = make_fg({}, 1);
    CHECK_THROWS_AS(prune(fg, 0.0, {0}), std::invalid_argument);
    CHECK_THROWS_AS(prune(fg, 0.5, {0, 0}), std::invalid_argument);  // size mismatch
  }
}

TEST_CASE("learn_features stops when a layer adds nothing") {
  // two disjoint paths: every operator column duplicates an existing one
  Graph g = Graph::from_edges({{0, 1}, {1, 2}, {3, 4}, {4, 5}});
  LearnConfig cfg;
  cfg.max_layers = 4;
  LearnResult res = learn_features(g, base_edge_features(g), cfg);
  CHECK(res.layers == 1);
  CHECK(res.features.X.cols() == 2);  // the two wedge-side columns
  REQUIRE(res.reps_per_layer.size() == 2);
  CHECK(res.reps_per_layer[0].size() == 2);
  CHECK(res.reps_per_layer[1].empty());
}

TEST_CASE("learn_features with max_layers zero returns deduplicated input") {
  Graph g = testutil::erdos_renyi(20, 0.3, 41);
  FeatureMatrix x0 = base_edge_features(g);
  LearnConfig cfg;
  cfg.max_layers = 0;
  LearnResult res = learn_features(g, x0, cfg);
  CHECK(res.features.X.cols() <= x0.X.cols());
  for (int layer : res.features.layer_of) CHECK(layer == 0);
  CHECK(res.layers == 1);
  // surviving columns are x0 columns in stored (log-binned) form
  for (Eigen::Index j = 0; j < res.features.X.cols(); ++j) {
    CHECK(res.features.defs[j].base);
    std::vector<int> bins = log_bin(x0.X.col(res.features.defs[j].orbit), cfg.alpha);
    for (Eigen::Index i = 0; i < res.features.X.rows(); ++i)
      CHECK(res.features.X(i, j) == static_cast<double>(bins[static_cast<std::size_t>(i)]));
  }
}

TEST_CASE("learned features on a denser graph") {
  Graph g = testutil::erdos_renyi(30, 0.2, 7);
  LearnConfig cfg;
  cfg.alpha = 0.5;
  cfg.eps = 0.1;
  cfg.max_layers = 3;
  LearnResult res = learn_features(g, base_edge_features(g), cfg);
  const FeatureMatrix& fm = res.features;
  REQUIRE(fm.X.cols() > 0);

  SUBCASE("shape and bookkeeping line up") {
    CHECK(fm.X.rows() == static_cast<Eigen::Index>(g.edge_count()));
    CHECK(fm.defs.size() == static_cast<std::size_t>(fm.X.cols()));
    CHECK(fm.layer_of.size() == fm.defs.size());
    CHECK(res.layers <= cfg.max_layers + 1);
    for (std::size_t j = 0; j < fm.defs.size(); ++j)
      CHECK(fm.layer_of[j] <= res.layers - 1);
  }
  SUBCASE("all entries non-negative and finite, no constant columns") {
    CHECK(fm.X.allFinite());
    CHECK(fm.X.minCoeff() >= 0.0);
    for (Eigen::Index j = 0; j < fm.X.cols(); ++j)
      CHECK(fm.X.col(j).minCoeff() < fm.X.col(j).maxCoeff());
  }
  SUBCASE("no surviving pair is redundant at its admission threshold") {
    std::vector<std::vector<int>> bins;
    for (Eigen::Index j = 0; j < fm.X.cols(); ++j)
      bins.push_back(log_bin(fm.X.col(j), cfg.alpha));
    for (std::size_t i = 0; i < bins.size(); ++i)
      for (std::size_t j = i + 1; j < bins.size(); ++j) {
        const int admit_layer = std::max(fm.layer_of[i], fm.layer_of[j]);
        const double gamma = threshold_for_layer(cfg, admit_layer);
        CHECK(1.0 - disagreement(bins[i], bins[j]) < gamma);
      }
  }
  SUBCASE("representative set only grows, ids in admission order") {
    std::size_t seen = 0;
    for (const std::vector<int>& layer_reps : res.reps_per_layer) {
      for (std::size_t i = 0; i < layer_reps.size(); ++i)
        CHECK(layer_reps[i] == static_cast<int>(seen + i));
      seen += layer_reps.size();
    }
    CHECK(seen == fm.defs.size());
  }
  SUBCASE("derivation DAG is acyclic and closed") {
    for (std::size_t j = 0; j < fm.defs.size(); ++j)
      if (!fm.defs[j].base) {
        CHECK(fm.defs[j].parent >= 0);
        CHECK(fm.defs[j].parent < static_cast<int>(j));
      }
  }
  SUBCASE("materializing the definitions reproduces the learned matrix") {
    Eigen::MatrixXd re = materialize(g, fm.defs);
    CHECK(re == fm.X);
  }
  SUBCASE("repeated runs are identical") {
    LearnResult res2 = learn_features(g, base_edge_features(g), cfg);
    CHECK(res2.features.X == fm.X);
    CHECK(res2.features.layer_of == fm.layer_of);
  }
  SUBCASE("thread count does not change the result") {
#ifdef _OPENMP
    int saved = omp_get_max_threads();
    omp_set_num_threads(3);
    LearnResult res2 = learn_features(g, base_edge_features(g), cfg);
    omp_set_num_threads(saved);
    CHECK(res2.features.X == fm.X);
#endif
  }
  SUBCASE("density is the exact nonzero fraction") {
    CHECK(fm.density() >= 0.0);
    CHECK(fm.density() <= 1.0);
    std::int64_t nnz = 0;
    for (Eigen::Index j = 0; j < fm.X.cols(); ++j)
      for (Eigen::Index i = 0; i < fm.X.rows(); ++i) nnz += fm.X(i, j) != 0.0;
    CHECK(fm.density() ==
          static_cast<double>(nnz) / static_cast<double>(fm.X.rows() * fm.X.cols()));
  }
}

TEST_CASE("learn_features validates its configuration") {
  Graph g = Graph::from_edges({{0, 1}, {1, 2}});
  FeatureMatrix x0 = base_edge_features(g);
  LearnConfig cfg;
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(learn_features(g, x0, cfg), std::invalid_argument);
  cfg = LearnConfig{};
  cfg.eps = 1.0;
  CHECK_THROWS_AS(learn_features(g, x0, cfg), std::invalid_argument);
  cfg = LearnConfig{};
  FeatureMatrix wrong = x0;
  wrong.X.conservativeResize(1, Eigen::NoChange);
  CHECK_THROWS_AS(learn_features(g, wrong, cfg), std::invalid_argument);
}

TEST_CASE("base features mirror the orbit counts") {
  Graph g = testutil::erdos_renyi(12, 0.4, 2);
  FeatureMatrix fm = base_edge_features(g);
  CountMatrix counts = edge_graphlets(g);
  CHECK(fm.X == counts.cast<double>());
  REQUIRE(fm.defs.size() == 9);
  for (int j = 0; j < 9; ++j) {
    CHECK(fm.defs[j].base);
    CHECK(fm.defs[j].name(fm.defs) == kEdgeOrbitNames[j]);
  }
}

TEST_CASE("feature names compose through parents") {
  std::vector<FeatureDef> defs;
  defs.push_back(FeatureDef{true, 0, Op::kMean, -1, 1});
  defs.push_back(FeatureDef{false, 0, Op::kSum, 0, 1});
  defs.push_back(FeatureDef{false, 0, Op::kRbf, 1, 2});
  CHECK(defs[1].name(defs) == "sum(triangle)");
  CHECK(defs[2].name(defs) == "rbf@2(sum(triangle))");
}

TEST_CASE("node features combine into edge features") {
  Graph g = Graph::from_edges({{0, 1}, {0, 2}, {1, 2}});

  SUBCASE("sum of ones doubles") {
    Eigen::MatrixXd z = Eigen::MatrixXd::Ones(3, 2);
    Eigen::MatrixXd e = node_to_edge_features(z, g, CombineOp::kSum);
    CHECK(e == Eigen::MatrixXd::Constant(3, 2, 2.0));
  }
  SUBCASE("absolute difference of vertex ids") {
    Eigen::MatrixXd z(3, 1);
    z << 0, 1, 2;
    Eigen::MatrixXd e = node_to_edge_features(z, g, CombineOp::kAbsDiff);
    CHECK(e(0, 0) == 1.0);  // (0,1)
    CHECK(e(1, 0) == 2.0);  // (0,2)
    CHECK(e(2, 0) == 1.0);  // (1,2)
  }
  SUBCASE("sums match the endpoint values") {
    Eigen::MatrixXd z(3, 1);
    z << 1, 2, 3;
    Eigen::MatrixXd e = node_to_edge_features(z, g, CombineOp::kSum);
    CHECK(e(0, 0) == 3.0);
    CHECK(e(1, 0) == 4.0);
    CHECK(e(2, 0) == 5.0);
  }
  SUBCASE("row mismatch is rejected") {
    Eigen::MatrixXd z = Eigen::MatrixXd::Ones(2, 1);
    CHECK_THROWS_AS(node_to_edge_features(z, g, CombineOp::kSum), std::invalid_argument);
  }
}
