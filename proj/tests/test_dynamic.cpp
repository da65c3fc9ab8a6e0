#include <doctest.h>

#include <cmath>
#include <vector>

#include "edgeroles/dynamic.hpp"
#include "support/streams.hpp"

using namespace edgeroles;

namespace {

// Minimal hand-built series for entropy arithmetic: one entity, given rows.
RoleSeries series_of_rows(const std::vector<Eigen::VectorXd>& rows) {
  RoleSeries rs;
  rs.rank = static_cast<int>(rows.front().size());
  rs.entities = {{0, 1}};
  for (const Eigen::VectorXd& row : rows)
    rs.memberships.push_back(row.transpose());
  rs.mean_loss.assign(rows.size(), 0.0);
  return rs;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("assign_roles takes the argmax") {
  Eigen::MatrixXd U(4, 3);
  U << 0.1, 0.7, 0.2,  //
      0.5, 0.5, 0.0,   //
      0.0, 0.0, 0.0,   //
      0.0, 0.0, 0.3;
  std::vector<int> labels = assign_roles(U);
  CHECK(labels == std::vector<int>{1, 0, kInactiveRole, 2});

  SUBCASE("invariant under positive rescaling") {
    CHECK(assign_roles(3.7 * U) == labels);
  }
  SUBCASE("negative memberships rejected") {
    Eigen::MatrixXd bad(1, 2);
    bad << -0.1, 0.5;
    CHECK_THROWS_AS(assign_roles(bad), std::invalid_argument);
  }
}

TEST_CASE("entropy_rank difference arithmetic") {
  SUBCASE("pure then uniform then slanted") {
    RoleSeries rs = series_of_rows({vec2(1, 0), vec2(0.5, 0.5), vec2(0.9, 0.1)});
    EntropySeries es = entropy_rank(rs);
    REQUIRE(es.ranked.size() == 1);
    CHECK(es.ranked[0].d == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(es.ranked[0].argmax_t == 1);
    CHECK(es.ranked[0].argmin_t == 0);
    CHECK(es.H(0, 0) == 0.0);
    CHECK(es.H(0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  }
  SUBCASE("constant membership scores zero") {
    RoleSeries rs = series_of_rows({vec2(0.3, 0.7), vec2(0.3, 0.7), vec2(0.3, 0.7)});
    EntropySeries es = entropy_rank(rs);
    REQUIRE(es.ranked.size() == 1);
    CHECK(es.ranked[0].d == 0.0);
  }
  SUBCASE("pure versus uniform hits the upper bound for three roles") {
    Eigen::VectorXd pure(3), uniform(3);
    pure << 1, 0, 0;
    uniform << 1.0 / 3, 1.0 / 3, 1.0 / 3;
    RoleSeries rs;
    rs.rank = 3;
    rs.entities = {{0, 1}};
    rs.memberships = {pure.transpose(), uniform.transpose()};
    rs.mean_loss = {0.0, 0.0};
    EntropySeries es = entropy_rank(rs);
    REQUIRE(es.ranked.size() == 1);
    CHECK(std::abs(es.ranked[0].d - std::log(3.0)) <= 1e-12);
  }
  SUBCASE("inactive snapshots are skipped, not counted as certainty") {
    RoleSeries rs = series_of_rows({vec2(0.5, 0.5), vec2(0, 0), vec2(0.5, 0.5)});
    EntropySeries es = entropy_rank(rs);
    REQUIRE(es.ranked.size() == 1);
    CHECK(es.ranked[0].d == 0.0);
    CHECK(std::isnan(rs.memberships[1](0, 0) == 0.0 ? es.H(0, 1) : 0.0));
  }
  SUBCASE("never-active entities do not appear in the ranking") {
    RoleSeries rs = series_of_rows({vec2(0, 0), vec2(0, 0)});
    EntropySeries es = entropy_rank(rs);
    CHECK(es.ranked.empty());
  }
  SUBCASE("ranking is sorted by descending difference") {
    RoleSeries rs;
    rs.rank = 2;
    rs.entities = {{0, 1}, {0, 2}, {1, 2}};
    Eigen::MatrixXd t0(3, 2), t1(3, 2);
    t0 << 1, 0, 0.5, 0.5, 0.8, 0.2;
    t1 << 0.5, 0.5, 0.5, 0.5, 0.7, 0.3;
    rs.memberships = {t0, t1};
    rs.mean_loss = {0.0, 0.0};
    EntropySeries es = entropy_rank(rs);
    REQUIRE(es.ranked.size() == 3);
    for (std::size_t i = 1; i < es.ranked.size(); ++i)
      CHECK(es.ranked[i - 1].d >= es.ranked[i].d);
    CHECK(es.ranked[0].entity == 0);  // pure-to-uniform swing is the largest
  }
}

TEST_CASE("train and infer on a homogeneous stream") {
  Graph stream = testutil::two_regime_stream(30, 6, 6, 5);
  SnapshotSeries series = snapshots(stream, 1);
  REQUIRE(series.size() == 6);

  TrainOptions opt;
  opt.features.max_layers = 1;
  opt.r_max = 4;
  RoleDefinitions defs = train_definitions(series, 3, opt);
  REQUIRE(defs.rank >= 1);
  CHECK(defs.V.cols() == defs.rank);
  CHECK(defs.V.rows() == static_cast<Eigen::Index>(defs.defs.size()));
  CHECK(defs.baseline_loss >= 0.0);
  CHECK(defs.train_k == 3);

  const Eigen::MatrixXd v_before = defs.V;
  RoleSeries rs = infer_series(series, defs);

  SUBCASE("definitions stay frozen bit for bit") {
    CHECK(defs.V == v_before);
    CHECK(rs.V == v_before);
    REQUIRE(rs.defs.size() == defs.defs.size());
  }
  SUBCASE("memberships cover every snapshot on the simplex") {
    REQUIRE(rs.memberships.size() == 6);
    for (const Eigen::MatrixXd& U : rs.memberships) {
      CHECK(U.rows() == static_cast<Eigen::Index>(rs.entities.size()));
      CHECK(U.minCoeff() >= 0.0);
      for (Eigen::Index i = 0; i < U.rows(); ++i) {
        const double s = U.row(i).sum();
        CHECK((s == 0.0 || std::abs(s - 1.0) <= 1e-9));
      }
    }
  }
  SUBCASE("entities are the sorted union of snapshot pairs") {
    for (std::size_t i = 1; i < rs.entities.size(); ++i)
      CHECK(rs.entities[i - 1] < rs.entities[i]);
    std::size_t covered = 0;
    for (std::size_t t = 0; t < series.size(); ++t)
      covered += series.snapshot(t).edge_count();
    CHECK(rs.entities.size() <= covered);
    CHECK(!rs.entities.empty());
  }
  SUBCASE("in-regime snapshots do not flag drift") {
    for (int t = 0; t < 6; ++t) CHECK(!check_drift(rs, t, 2.0));
    CHECK_THROWS_AS(check_drift(rs, 6, 2.0), std::out_of_range);
    CHECK_THROWS_AS(check_drift(rs, 0, 1.0), std::invalid_argument);
  }
  SUBCASE("entropy stays within the rank bound") {
    EntropySeries es = entropy_rank(rs);
    const double bound = std::log(static_cast<double>(rs.rank)) + 1e-9;
    for (const EntropyRecord& rec : es.ranked) {
      CHECK(rec.d >= 0.0);
      CHECK(rec.d <= bound);
    }
  }
}

TEST_CASE("regime change flags drift") {
  for (std::uint64_t seed : {11u, 12u}) {
    CAPTURE(seed);
    Graph stream = testutil::two_regime_stream(30, 8, 4, seed);
    SnapshotSeries series = snapshots(stream, 1);
    REQUIRE(series.size() == 8);

    TrainOptions opt;
    opt.features.max_layers = 1;
    opt.r_max = 4;
    RoleDefinitions defs = train_definitions(series, 2, opt);
    RoleSeries rs = infer_series(series, defs);

    int regime1_flags = 0, regime2_flags = 0;
    for (int t = 2; t < 4; ++t) regime1_flags += check_drift(rs, t, 2.0);
    for (int t = 4; t < 8; ++t) regime2_flags += check_drift(rs, t, 2.0);
    CHECK(regime1_flags == 0);
    CHECK(regime2_flags >= 3);
  }
}

TEST_CASE("an empty snapshot maps everyone to inactivity") {
  std::vector<Edge> edges;
  std::vector<std::int64_t> stamps;
  auto add_burst = [&](std::int64_t t) {
    // clique with a pendant tail, so feature columns are not constant
    for (VertexId a = 0; a < 5; ++a)
      for (VertexId b = a + 1; b < 5; ++b) {
        edges.push_back({a, b});
        stamps.push_back(t);
      }
    edges.push_back({4, 5});
    stamps.push_back(t);
    edges.push_back({5, 6});
    stamps.push_back(t);
  };
  add_burst(0);
  add_burst(2);  // nothing happens at t=1
  Graph stream = Graph::from_edges(edges, false, {}, stamps);
  SnapshotSeries series = snapshots(stream, 1);
  REQUIRE(series.size() == 3);
  REQUIRE(series.snapshot(1).edge_count() == 0);

  TrainOptions opt;
  opt.features.max_layers = 0;
  opt.r_max = 2;
  RoleDefinitions defs = train_definitions(series, 1, opt);
  RoleSeries rs = infer_series(series, defs);
  CHECK(rs.memberships[1].maxCoeff() == 0.0);
  CHECK(rs.mean_loss[1] == 0.0);
  CHECK(!check_drift(rs, 1, 2.0));

  // clique plus tail edges, active at t=0 and t=2 with identical structure;
  // rows whose stored features are all bin zero count as featureless, so the
  // ranking covers a subset of the twelve pairs
  CHECK(rs.entities.size() == 12);
  EntropySeries es = entropy_rank(rs);
  CHECK(!es.ranked.empty());
  CHECK(es.ranked.size() <= 12);
  for (const EntropyRecord& rec : es.ranked)
    CHECK(std::isnan(es.H(static_cast<Eigen::Index>(rec.entity), 1)));
}

TEST_CASE("train_definitions validates the window") {
  Graph stream = testutil::two_regime_stream(20, 3, 3, 9);
  SnapshotSeries series = snapshots(stream, 1);
  CHECK_THROWS_AS(train_definitions(series, 0), std::out_of_range);
  CHECK_THROWS_AS(train_definitions(series, 4), std::out_of_range);
}

TEST_CASE("learn_timescale prefers a period-aligned width") {
  // regime alternates with period 2: widths 1 and 2 sample whole phases,
  // width 5 cuts through them unevenly
  std::vector<Edge> edges;
  std::vector<std::int64_t> stamps;
  std::mt19937_64 rng(33);
  for (std::int64_t t = 0; t < 12; ++t) {
    const bool clique_phase = t % 2 == 0;
    if (clique_phase) {
      const int sizes[4] = {3, 4, 5, 6};
      for (int base = 0, g = 0; base + sizes[g % 4] <= 20; base += sizes[g % 4], ++g)
        for (VertexId a = base; a < static_cast<VertexId>(base + sizes[g % 4]); ++a)
          for (VertexId b = a + 1; b < static_cast<VertexId>(base + sizes[g % 4]); ++b) {
            edges.push_back({a, b});
            stamps.push_back(t);
          }
    } else {
      for (int i = 0; i < 36; ++i) {
        const auto a = static_cast<VertexId>(rng() % 20);
        const auto b = static_cast<VertexId>(rng() % 20);
        if (a == b) continue;
        edges.push_back({a, b});
        stamps.push_back(t);
      }
    }
  }
  Graph stream = Graph::from_edges(edges, false, {}, stamps, 20);

  TrainOptions opt;
  opt.features.max_layers = 0;
  const std::int64_t aligned = learn_timescale(stream, {1, 2, 5}, opt, 2);
  CHECK((aligned == 1 || aligned == 2));

  SUBCASE("candidates spanning the whole stream are skipped") {
    CHECK(learn_timescale(stream, {1000, aligned}, opt, 2) == aligned);
    CHECK_THROWS_AS(learn_timescale(stream, {1000, 2000}, opt, 2), std::runtime_error);
  }
  SUBCASE("identical splits tie toward the larger width") {
    std::vector<Edge> burst_edges;
    std::vector<std::int64_t> burst_stamps;
    for (std::int64_t t : {0, 10}) {
      for (VertexId a = 0; a < 5; ++a)
        for (VertexId b = a + 1; b < 5; ++b) {
          burst_edges.push_back({a, b});
          burst_stamps.push_back(t);
        }
      burst_edges.push_back({4, 5});
      burst_stamps.push_back(t);
      burst_edges.push_back({5, 6});
      burst_stamps.push_back(t);
    }
    Graph bursts = Graph::from_edges(burst_edges, false, {}, burst_stamps);
    // widths 7 and 9 both cut between the two bursts
    CHECK(learn_timescale(bursts, {7, 9}, opt, 2) == 9);
  }
  SUBCASE("argument validation") {
    CHECK_THROWS_AS(learn_timescale(stream, {aligned}, opt, 2), std::invalid_argument);
    CHECK_THROWS_AS(learn_timescale(stream, {0, 2}, opt, 2), std::invalid_argument);
  }
}

TEST_CASE("prefix-trained definitions fit their own regime best") {
  Graph stream = testutil::two_regime_stream(30, 8, 4, 21);
  SnapshotSeries series = snapshots(stream, 1);
  TrainOptions opt;
  opt.features.max_layers = 1;
  opt.r_max = 4;
  RoleDefinitions defs = train_definitions(series, 4, opt);
  RoleSeries rs = infer_series(series, defs);
  double regime1 = 0.0, regime2 = 0.0;
  for (int t = 0; t < 4; ++t) regime1 += rs.mean_loss[t];
  for (int t = 4; t < 8; ++t) regime2 += rs.mean_loss[t];
  CHECK(regime1 < regime2);
}
