#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "edgeroles/factorize.hpp"
#include "edgeroles/features.hpp"
#include "edgeroles/graph.hpp"
#include "edgeroles/mdl.hpp"

namespace edgeroles {

// Label reported for an entity with no memberships in a snapshot.
inline constexpr int kInactiveRole = -1;

struct TrainOptions {
  LearnConfig features;
  FitConfig fit;
  int r_min = 1;
  int r_max = 8;
  Divergence divergence = Divergence::kFro;
};

// Frozen outcome of training on a prefix window: feature definitions, role
// definitions and the rank the description-length sweep settled on.
struct RoleDefinitions {
  std::vector<FeatureDef> defs;
  Eigen::MatrixXd V;  // features x roles
  int rank = 0;
  int train_k = 0;
  int feature_layers = 0;
  double bin_alpha = 0.5;  // binning fraction the features were learned with
  Divergence divergence = Divergence::kFro;
  double baseline_loss = 0.0;  // mean training loss per active edge
  MdlReport rank_report;
};

// Per-snapshot memberships against frozen definitions. Entities are the
// distinct edge pairs seen anywhere in the series; a zero row means the pair
// was absent (or featureless) in that snapshot.
struct RoleSeries {
  std::vector<FeatureDef> defs;
  Eigen::MatrixXd V;
  int rank = 0;
  Divergence divergence = Divergence::kFro;
  std::vector<std::pair<VertexId, VertexId>> entities;
  std::vector<Eigen::MatrixXd> memberships;  // per t: entities x rank, rows on the simplex or zero
  std::vector<double> mean_loss;             // per t, averaged over active entities
  double baseline_loss = 0.0;
};

struct EntropyRecord {
  std::size_t entity = 0;  // index into RoleSeries::entities
  double d = 0.0;          // max-over-time minus min-over-time entropy
  int argmax_t = -1;
  int argmin_t = -1;
};

struct EntropySeries {
  Eigen::MatrixXd H;                  // entities x T, NaN where inactive
  std::vector<EntropyRecord> ranked;  // descending by d; never-active entities excluded
};

// Learns features and role definitions on the union of the first k snapshots.
RoleDefinitions train_definitions(const SnapshotSeries& series, int k,
                                  const TrainOptions& opt = TrainOptions{});

// Evaluates the frozen definitions on every snapshot and infers memberships.
// Neither the feature definitions nor V are modified.
RoleSeries infer_series(const SnapshotSeries& series, const RoleDefinitions& defs,
                        const FitConfig& fitcfg = FitConfig{});

// Difference-entropy ranking over the series; entropies in nats.
EntropySeries entropy_rank(const RoleSeries& series);

// Picks the snapshot width whose prefix-trained model best reconstructs the
// held-out suffix. Candidates yielding fewer than two snapshots are skipped;
// exact error ties go to the larger width.
std::int64_t learn_timescale(const Graph& g, const std::vector<std::int64_t>& widths,
                             const TrainOptions& opt = TrainOptions{}, int rank = 3);

// True when snapshot t reconstructs worse than factor times the training
// baseline (floored at numerical noise, so an exact training fit never flags
// everything). Retraining on drift is the caller's decision.
bool check_drift(const RoleSeries& series, int t, double factor = 2.0);

// Hard role labels: per-row argmax, smallest index on ties, kInactiveRole for
// all-zero rows.
std::vector<int> assign_roles(const Eigen::MatrixXd& U);

}  // namespace edgeroles
