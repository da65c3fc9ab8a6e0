#include "edgeroles/dynamic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace edgeroles {

namespace {

// Mean reconstruction loss over rows that carry any signal.
double mean_active_loss(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U,
                        const Eigen::MatrixXd& V, Divergence div) {
  if (X.rows() == 0) return 0.0;
  std::int64_t active = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) active += X.row(i).sum() > 0.0;
  if (active == 0) return 0.0;
  return bregman_loss(X, U, V, div) / static_cast<double>(active);
}

double row_entropy(const Eigen::VectorXd& u) {
  double h = 0.0;
  for (Eigen::Index k = 0; k < u.size(); ++k)
    if (u[k] > 0.0) h -= u[k] * std::log(u[k]);
  return h;
}

}  // namespace

RoleDefinitions train_definitions(const SnapshotSeries& series, int k,
                                  const TrainOptions& opt) {
  if (k < 1 || static_cast<std::size_t>(k) > series.size())
    throw std::out_of_range("train_definitions: prefix length out of range");

  const Graph train = union_window(series, static_cast<std::size_t>(k));
  if (train.edge_count() == 0)
    throw std::runtime_error("train_definitions: training window has no edges");

  LearnResult learned = learn_features(train, base_edge_features(train), opt.features);
  const Eigen::MatrixXd& X = learned.features.X;
  if (X.cols() == 0)
    throw std::runtime_error("train_definitions: no informative features in training window");

  const int r_cap = static_cast<int>(std::min(X.rows(), X.cols()));
  const int r_hi = std::min(opt.r_max, r_cap);
  const int r_lo = std::min(opt.r_min, r_hi);
  if (r_lo < 1)
    throw std::invalid_argument("train_definitions: rank range must start at 1");

  RoleDefinitions defs;
  defs.rank_report = select_rank(X, r_lo, r_hi, opt.divergence, opt.fit);
  defs.rank = defs.rank_report.best_rank;
  RoleModel model = fit(X, defs.rank, opt.divergence, opt.fit);
  defs.defs = learned.features.defs;
  defs.V = model.V;
  defs.train_k = k;
  defs.feature_layers = learned.layers;
  defs.bin_alpha = opt.features.alpha;
  defs.divergence = opt.divergence;
  defs.baseline_loss = mean_active_loss(X, model.U, model.V, opt.divergence);
  return defs;
}

RoleSeries infer_series(const SnapshotSeries& series, const RoleDefinitions& defs,
                        const FitConfig& fitcfg) {
  if (series.size() == 0) throw std::invalid_argument("infer_series: empty series");
  if (defs.rank < 1 || defs.V.cols() != defs.rank)
    throw std::invalid_argument("infer_series: definitions not trained");

  RoleSeries out;
  out.defs = defs.defs;
  out.V = defs.V;
  out.rank = defs.rank;
  out.divergence = defs.divergence;
  out.baseline_loss = defs.baseline_loss;

  const std::size_t T = series.size();
  std::vector<Graph> snaps;
  snaps.reserve(T);
  for (std::size_t t = 0; t < T; ++t) snaps.push_back(series.snapshot(t));

  for (const Graph& g : snaps)
    for (const Edge& e : g.edges()) out.entities.emplace_back(e.src, e.dst);
  std::sort(out.entities.begin(), out.entities.end());
  out.entities.erase(std::unique(out.entities.begin(), out.entities.end()),
                     out.entities.end());
  const Eigen::Index n_ent = static_cast<Eigen::Index>(out.entities.size());

  out.memberships.reserve(T);
  out.mean_loss.resize(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    const Graph& g = snaps[t];
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n_ent, defs.rank);
    if (g.edge_count() > 0) {
      const Eigen::MatrixXd X_t = materialize(g, defs.defs, defs.bin_alpha);
      Eigen::MatrixXd U_t = infer_memberships(X_t, defs.V, defs.divergence, fitcfg);
      out.mean_loss[t] = mean_active_loss(X_t, U_t, defs.V, defs.divergence);
      for (Eigen::Index i = 0; i < U_t.rows(); ++i) {
        const double total = U_t.row(i).sum();
        if (total > 0.0) U_t.row(i) /= total;
      }
      for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(g.edge_count()); ++i) {
        const Edge& e = g.edge(static_cast<EdgeId>(i));
        const auto it = std::lower_bound(out.entities.begin(), out.entities.end(),
                                         std::make_pair(e.src, e.dst));
        full.row(it - out.entities.begin()) = U_t.row(i);
      }
    }
    out.memberships.push_back(std::move(full));
  }
  return out;
}

EntropySeries entropy_rank(const RoleSeries& series) {
  const std::size_t T = series.memberships.size();
  if (T == 0) throw std::invalid_argument("entropy_rank: series has no snapshots");
  const Eigen::Index n_ent = static_cast<Eigen::Index>(series.entities.size());

  EntropySeries out;
  out.H = Eigen::MatrixXd::Constant(n_ent, static_cast<Eigen::Index>(T),
                                    std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index e = 0; e < n_ent; ++e) {
    EntropyRecord rec;
    rec.entity = static_cast<std::size_t>(e);
    double h_max = 0.0, h_min = 0.0;
    bool seen = false;
    for (std::size_t t = 0; t < T; ++t) {
      const Eigen::VectorXd u = series.memberships[t].row(e);
      if (u.sum() <= 0.0) continue;  // inactive: entropy undefined on the zero row
      const double h = row_entropy(u);
      out.H(e, static_cast<Eigen::Index>(t)) = h;
      if (!seen || h > h_max) {
        h_max = h;
        rec.argmax_t = static_cast<int>(t);
      }
      if (!seen || h < h_min) {
        h_min = h;
        rec.argmin_t = static_cast<int>(t);
      }
      seen = true;
    }
    if (!seen) continue;
    rec.d = h_max - h_min;
    out.ranked.push_back(rec);
  }
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const EntropyRecord& a, const EntropyRecord& b) {
                     return a.d > b.d;
                   });
  return out;
}

std::int64_t learn_timescale(const Graph& g, const std::vector<std::int64_t>& widths,
                             const TrainOptions& opt, int rank) {
  if (widths.size() < 2)
    throw std::invalid_argument("learn_timescale: need at least two candidate widths");
  if (rank < 1) throw std::invalid_argument("learn_timescale: rank must be positive");
  for (std::int64_t w : widths)
    if (w <= 0) throw std::invalid_argument("learn_timescale: widths must be positive");

  bool have_best = false;
  double best_err = 0.0;
  std::int64_t best_width = 0;
  for (std::int64_t w : widths) {
    SnapshotSeries series = snapshots(g, w);
    const std::size_t T = series.size();
    if (T < 2) continue;
    const int k = static_cast<int>(T / 2);

    RoleDefinitions defs;
    try {
      TrainOptions fixed = opt;
      fixed.r_min = rank;
      fixed.r_max = rank;
      defs = train_definitions(series, k, fixed);
    } catch (const std::runtime_error&) {
      continue;  // degenerate training window behaves like too few snapshots
    }

    double err = 0.0;
    int counted = 0;
    for (std::size_t t = static_cast<std::size_t>(k); t < T; ++t) {
      const Graph snap = series.snapshot(t);
      if (snap.edge_count() == 0) continue;
      const Eigen::MatrixXd X_t = materialize(snap, defs.defs, defs.bin_alpha);
      const Eigen::MatrixXd U_t =
          infer_memberships(X_t, defs.V, defs.divergence, opt.fit);
      err += mean_active_loss(X_t, U_t, defs.V, defs.divergence);
      ++counted;
    }
    if (counted == 0) continue;
    err /= static_cast<double>(counted);

    if (!have_best || err < best_err || (err == best_err && w > best_width)) {
      have_best = true;
      best_err = err;
      best_width = w;
    }
  }
  if (!have_best)
    throw std::runtime_error("learn_timescale: no candidate width produced a usable split");
  return best_width;
}

bool check_drift(const RoleSeries& series, int t, double factor) {
  if (t < 0 || static_cast<std::size_t>(t) >= series.mean_loss.size())
    throw std::out_of_range("check_drift: snapshot index out of range");
  if (!(factor > 1.0))
    throw std::invalid_argument("check_drift: factor must exceed 1");
  // near-exact training fits leave a baseline of rounding dust; comparing
  // against that would flag every snapshot, so floor it at a level far below
  // any real reconstruction error on binned counts
  constexpr double kNoiseFloor = 1e-9;
  const double baseline = std::max(series.baseline_loss, kNoiseFloor);
  return series.mean_loss[static_cast<std::size_t>(t)] > factor * baseline;
}

std::vector<int> assign_roles(const Eigen::MatrixXd& U) {
  if ((U.array() < 0.0).any())
    throw std::invalid_argument("assign_roles: memberships must be non-negative");
  std::vector<int> labels(static_cast<std::size_t>(U.rows()), kInactiveRole);
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    double best = 0.0;
    int arg = kInactiveRole;
    for (Eigen::Index k = 0; k < U.cols(); ++k)
      if (U(i, k) > best) {
        best = U(i, k);
        arg = static_cast<int>(k);
      }
    labels[static_cast<std::size_t>(i)] = arg;
  }
  return labels;
}

}  // namespace edgeroles
