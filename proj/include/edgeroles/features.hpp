#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "edgeroles/graph.hpp"

namespace edgeroles {

enum class Op {
  kMean,
  kSum,
  kProduct,
  kMin,
  kMax,
  kVariance,
  kL1,
  kL2,
  kRbf,      // own-vs-neighbor similarity kernels, averaged
  kPoly,
  kSigmoid,
};

const char* op_name(Op op);
Op op_from_name(const std::string& name);  // unknown name -> invalid_argument
std::vector<Op> all_ops();
// The eight aggregation operators, without the similarity kernels. Kernel
// columns are dense by construction (rbf of two zeros is 1), so they are
// opt-in rather than part of the default search.
std::vector<Op> aggregate_ops();

// How a feature column was produced: either a graphlet orbit column or an
// operator applied to an earlier feature over h-hop edge neighborhoods.
struct FeatureDef {
  bool base = true;
  int orbit = 0;          // base: index into kEdgeOrbitNames
  Op op = Op::kMean;      // derived
  int parent = -1;        // derived: column index in the owning matrix
  int hops = 1;

  std::string name(const std::vector<FeatureDef>& all) const;
};

struct FeatureMatrix {
  // m x f, non-negative. Learned matrices hold log-binned values (bin index
  // per row), which is what makes them sparse; base_edge_features holds raw
  // orbit counts since it feeds the search rather than coming out of it.
  Eigen::MatrixXd X;
  std::vector<FeatureDef> defs;
  std::vector<int> layer_of;

  double density() const;  // exact nonzero fraction
};

struct LearnConfig {
  double alpha = 0.5;  // bin-size fraction, (0, 1]
  double eps = 0.1;    // threshold step per layer, (0, 1)
  int max_layers = 4;
  std::vector<Op> ops = aggregate_ops();
  int hops = 1;
  std::uint64_t seed = 0;  // kept for interface symmetry; the search is deterministic
};

// All edges sharing an endpoint with e (within `hops` steps of the edge
// adjacency), excluding e itself. Sorted ascending.
std::vector<EdgeId> edge_neighbors(const Graph& g, EdgeId e, int hops = 1);

// One relational-operator application: out[i] aggregates column values over
// edge_neighbors(i). Kernel operators compare the row's own value against
// each neighbor value and average.
Eigen::VectorXd apply_operator(const Eigen::MatrixXd& X, int col, Op op, const Graph& g,
                               int hops = 1);

// Vertical logarithmic binning: bin k takes the ceil(alpha*m*(1-alpha)^k)
// smallest remaining values; equal values always share a bin. Depends only on
// the rank order of the column.
std::vector<int> log_bin(const Eigen::VectorXd& values, double alpha);

// Fraction of rows whose bins differ.
double disagreement(const std::vector<int>& a, const std::vector<int>& b);

// Pairwise feature agreement, W(i,j) = 1 - disagreement. Symmetric, unit diagonal.
struct FeatureGraph {
  Eigen::MatrixXd W;
};

FeatureGraph build_feature_graph(const std::vector<std::vector<int>>& bins);

// Drops feature-graph edges below gamma, partitions the rest into connected
// components, and keeps one representative per component: smallest layer,
// then smallest id. Features flagged in `keep` (earlier representatives) are
// never dropped. Returns surviving ids ascending.
std::vector<int> prune(const FeatureGraph& fg, double gamma, const std::vector<int>& layer_of,
                       const std::vector<char>& keep = {});

struct LearnResult {
  FeatureMatrix features;
  int layers = 0;  // L: number of layers holding at least one representative
  // representative ids after each processed layer, for auditability
  std::vector<std::vector<int>> reps_per_layer;
  std::vector<double> gamma_per_layer;
};

// Layered feature search: alternately generates operator columns from the
// newest representatives and collapses redundant ones via the feature graph.
// The returned matrix stores each surviving column in log-binned form.
LearnResult learn_features(const Graph& g, const FeatureMatrix& x0, const LearnConfig& cfg);

// Evaluates a learned definition list on a (possibly different) graph,
// applying the same final binning as learn_features. `bin_alpha` must match
// the alpha the definitions were learned with for the outputs to line up.
Eigen::MatrixXd materialize(const Graph& g, const std::vector<FeatureDef>& defs,
                            double bin_alpha = 0.5);

// The 9 orbit-count columns as a layer-0 FeatureMatrix.
FeatureMatrix base_edge_features(const Graph& g);

enum class CombineOp { kSum, kMean, kMax, kMin, kProduct, kAbsDiff };

// Turns node features into edge features by combining the two endpoint rows.
Eigen::MatrixXd node_to_edge_features(const Eigen::MatrixXd& z, const Graph& g, CombineOp op);

double threshold_for_layer(const LearnConfig& cfg, int layer);

}  // namespace edgeroles
