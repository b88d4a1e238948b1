#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mahler/experiments.hpp"
#include "mahler/json_io.hpp"
#include "mahler/stats.hpp"

using namespace mahler;

namespace {

using Q = Rational;
using V = Vector<Q>;

Q q(long p, long r = 1) { return ratio<Q>(p, r); }

TrialConfig<Q> exact_config(int n, Q delta_max = q(1, 100)) {
  TrialConfig<Q> cfg;
  cfg.n = n;
  cfg.delta_max = delta_max;
  return cfg;
}

VPolytope<Q> cut_corner_square(const Q& t) {
  return VPolytope<Q>(2, {V{Q(1 - t), q(1)}, V{q(1), Q(1 - t)}, V{Q(t - 1), q(-1)}, V{q(-1), Q(t - 1)},
                          V{q(1), q(-1)}, V{q(-1), q(1)}});
}

}  // namespace

TEST(WitnessPoint, PlanarValues) {
  auto w = witness_point(q(1, 100), 2);
  EXPECT_EQ(w.point, (V{q(99, 100), q(1, 75)}));
  EXPECT_EQ(w.c_prime, q(4, 3));
  EXPECT_EQ(w.c_second, q(1, 3));
}

TEST(WitnessPoint, SpatialValues) {
  auto w = witness_point(q(1, 100), 3);
  EXPECT_EQ(w.point, (V{q(99, 100), q(1, 175), q(1, 175)}));
  EXPECT_EQ(w.c_second, q(1, 7));
}

TEST(WitnessPoint, ZeroDeltaIsFirstBasisVector) { EXPECT_EQ(witness_point(q(0), 4).point, unit_vector<Q>(4, 0)); }

TEST(WitnessPoint, RejectsLineCase) { EXPECT_THROW(witness_point(q(1, 10), 1), std::invalid_argument); }

TEST(WitnessFrame, RoundTrip) {
  WitnessFrame frame(CubeFace({-1, 1, -1}), 2);
  const V x{q(1), q(2), q(3)};
  EXPECT_EQ(frame.to_frame(x), (V{q(-3), q(-1), q(2)}));
  EXPECT_EQ(frame.from_frame(frame.to_frame(x)), x);
  EXPECT_EQ(frame.to_frame(CubeFace({-1, 1, -1}).center<Q>()), (V{q(1), q(1), q(1)}));
}

TEST(Sampler, DeterministicPerIndex) {
  auto cfg = exact_config(3);
  cfg.seed = 99;
  for (int i = 0; i < 6; ++i) {
    auto a = sample_body_near_cube(cfg, i);
    auto b = sample_body_near_cube(cfg, i);
    EXPECT_TRUE(a.body.same_vertex_set(b.body));
    EXPECT_EQ(a.depth, b.depth);
    EXPECT_EQ(static_cast<int>(a.generator), i % 3);
  }
  auto other = cfg;
  other.seed = 100;
  int differing = 0;
  for (int i = 0; i < 6; ++i)
    if (!sample_body_near_cube(cfg, i).body.same_vertex_set(sample_body_near_cube(other, i).body)) ++differing;
  EXPECT_GT(differing, 0);
}

TEST(Sampler, SandwichAndSymmetry) {
  for (int n = 2; n <= 4; ++n) {
    auto cfg = exact_config(n, q(1, 20));
    cfg.seed = 5;
    for (int i = 0; i < 9; ++i) {
      auto sb = sample_body_near_cube(cfg, i);
      EXPECT_TRUE(sb.body.symmetric());
      EXPECT_GT(sb.depth, q(0));
      EXPECT_LE(sb.depth, cfg.delta_max);
      EXPECT_TRUE(contains(VPolytope<Q>::cube(n), sb.body));
      EXPECT_TRUE(contains(sb.body, VPolytope<Q>::cube(n).scaled(Q(1 - sb.depth))));
    }
  }
}

TEST(Sampler, ZeroDeltaGivesCube) {
  auto cfg = exact_config(3, q(0));
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(sample_body_near_cube(cfg, i).body.same_vertex_set(VPolytope<Q>::cube(3)));
}

TEST(CubeWithCut, ShallowCutIsCube) {
  EXPECT_TRUE(cube_with_cut(V{q(1), q(-1), q(1)}, q(0)).same_vertex_set(VPolytope<Q>::cube(3)));
  EXPECT_TRUE(cube_with_cut(V{q(2), q(-1)}, q(0)).same_vertex_set(VPolytope<Q>::cube(2)));
  EXPECT_FALSE(cube_with_cut(V{q(3), q(0)}, q(1, 10)).same_vertex_set(VPolytope<Q>::cube(2)));
}

TEST(CubeWithCut, DiagonalCutInThePlaneIsAHexagon) {
  const Q t = q(1, 50);
  auto k = cube_with_cut(V{q(1), q(1)}, t);
  EXPECT_EQ(k.vertices().size(), 6u);
  EXPECT_TRUE(k.same_vertex_set(cut_corner_square(Q(2 * t))));
  EXPECT_EQ(canonicalize(k).delta, t);
}

TEST(BuildPPair, CubeGivesBaseConfiguration) {
  for (int n = 2; n <= 3; ++n) {
    auto cc = build_P_pair(VPolytope<Q>::cube(n));
    EXPECT_EQ(cc.primal, base_points<Q>(n));
    EXPECT_EQ(cc.dual, base_dual_points<Q>(n));
    for (const auto& f : enumerate_faces(n)) EXPECT_EQ(cc.alpha[f], q(1));
  }
}

TEST(BuildPPair, ContainmentAndAntisymmetry) {
  auto cfg = exact_config(3);
  cfg.seed = 8;
  for (int i = 0; i < 6; ++i) {
    auto khat = canonicalize(sample_body_near_cube(cfg, i).body).body;
    auto cc = build_P_pair(khat);
    EXPECT_TRUE(contains_points(khat.facets(), flag_point_list(cc.primal), q(1)));
    EXPECT_TRUE(contains_points(khat.vertices(), flag_point_list(cc.dual), q(1)));
    EXPECT_TRUE(is_antisymmetric(cc.primal));
    EXPECT_TRUE(is_antisymmetric(cc.dual));
  }
}

TEST(Dichotomy, CubeIsTrivial) {
  auto cc = build_P_pair(VPolytope<Q>::cube(3));
  EXPECT_EQ(dichotomy_check(VPolytope<Q>::cube(3), cc, q(0), q(1, 10)).outcome, Dichotomy::trivial);
}

TEST(Dichotomy, CutSquareNeverNeither) {
  for (long den : {20L, 100L, 1000L}) {
    auto c = canonicalize(cut_corner_square(q(1, den)));
    auto r = dichotomy_check(c.body, build_P_pair(c.body), c.delta, q(1, 10));
    EXPECT_NE(r.outcome, Dichotomy::neither);
    EXPECT_NE(r.outcome, Dichotomy::trivial);
  }
}

TEST(Dichotomy, PolarBranchCarriesCertifiedWitness) {
  auto cfg = exact_config(3);
  cfg.seed = 3;
  int polar = 0;
  for (int i = 0; i < 30; ++i) {
    auto rep = run_single_trial(cfg, i);
    const auto& d = rep.dichotomy;
    if (d.outcome != Dichotomy::polar_escapes) continue;
    ++polar;
    ASSERT_TRUE(d.witness_found);
    EXPECT_TRUE(d.case_same_face);
    EXPECT_TRUE(d.case_other_faces);
    EXPECT_TRUE(d.witness_in_polar);
    EXPECT_TRUE(d.witness_outside_Pp);
    EXPECT_TRUE(d.halfspace_certificate);
  }
  EXPECT_GT(polar, 0);
}

TEST(DefaultProbe, Values) {
  EXPECT_EQ(default_probe_constant<Q>(2), q(1, 12));
  EXPECT_EQ(default_probe_constant<Q>(3), q(1, 28));
}

TEST(Trial, DeltaZeroIsBaseline) {
  auto rep = run_trial_on(VPolytope<Q>::cube(3), std::optional<Q>{});
  EXPECT_EQ(rep.delta, q(0));
  EXPECT_EQ(rep.excess, q(0));
  EXPECT_EQ(rep.PK, q(32, 3));
  EXPECT_EQ(rep.volP, q(8));
  EXPECT_EQ(rep.volPp, q(4, 3));
  EXPECT_EQ(rep.gap_PQ, q(0));
  EXPECT_EQ(rep.chain_loss, q(0));
  EXPECT_EQ(rep.dichotomy.outcome, Dichotomy::trivial);
  EXPECT_TRUE(rep.anomaly.empty());
}

TEST(Trial, PlanarExactRunHasNoAnomalies) {
  auto cfg = exact_config(2);
  cfg.trials = 60;
  cfg.seed = 1;
  auto run = run_trials(cfg);
  EXPECT_EQ(run.aggregates.anomalies, 0u);
  EXPECT_EQ(run.aggregates.neither, 0u);
  EXPECT_GE(run.aggregates.min_excess, 0.0);
  for (const auto& r : run.reports) {
    EXPECT_TRUE(r.touching_certified);
    EXPECT_TRUE(r.contact_products_one);
    EXPECT_TRUE(r.P_in_K);
    EXPECT_TRUE(r.Pp_in_Kstar);
    EXPECT_GE(r.chain_slack, -1e-12);
  }
}

TEST(Trial, ChainInequalitiesHoldInThreeDimensions) {
  auto cfg = exact_config(3);
  cfg.trials = 15;
  cfg.seed = 2;
  auto run = run_trials(cfg);
  EXPECT_EQ(run.aggregates.anomalies, 0u);
  for (const auto& r : run.reports) {
    // P(K) >= vol P vol P' >= vol Q vol Q' - C delta^2 and vol Q vol Q' >= P(cube).
    EXPECT_GE(r.PK, r.volP * r.volPp);
    EXPECT_GE(r.volQ * r.volQp, r.PB);
    EXPECT_GE(r.excess, q(0));
  }
}

TEST(Trial, FloatMatchesExact) {
  auto ce = exact_config(3);
  ce.trials = 9;
  ce.seed = 4;
  TrialConfig<double> cf;
  cf.n = 3;
  cf.delta_max = 0.01;
  cf.trials = 9;
  cf.seed = 4;
  auto re = run_trials(ce);
  auto rf = run_trials(cf);
  for (int i = 0; i < 9; ++i) {
    EXPECT_EQ(re.reports[i].dichotomy.outcome, rf.reports[i].dichotomy.outcome);
    EXPECT_NEAR(to_double(re.reports[i].excess), rf.reports[i].excess, 1e-9);
    EXPECT_NEAR(to_double(re.reports[i].delta), rf.reports[i].delta, 1e-9);
  }
}

TEST(Trial, ThreadCountDoesNotChangeReports) {
  auto cfg = exact_config(3);
  cfg.trials = 12;
  cfg.seed = 6;
  auto one = run_trials(cfg);
  cfg.threads = 4;
  auto four = run_trials(cfg);
  for (int i = 0; i < 12; ++i) EXPECT_EQ(to_json(one.reports[i], 3).dump(), to_json(four.reports[i], 3).dump());
}

TEST(Trial, ConfigValidation) {
  auto cfg = exact_config(3);
  cfg.delta_max = q(1, 10);
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = exact_config(1);
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = exact_config(3);
  cfg.threads = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = exact_config(3);
  cfg.c_probe = q(-1);
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Stats, LineFitRecoversSlope) {
  std::vector<double> x, y;
  for (int i = 1; i <= 20; ++i) {
    x.push_back(i);
    y.push_back(3.0 * i + 1.0 + ((i % 2) ? 0.01 : -0.01));
  }
  auto fit = fit_line(x, y);
  EXPECT_NEAR(fit.slope, 3.0, 1e-3);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-2);
  EXPECT_LT(fit.p_value, 1e-10);
  EXPECT_EQ(fit.samples, 20u);
}

TEST(Stats, FlatDataHasLargePValue) {
  std::vector<double> x, y;
  for (int i = 1; i <= 20; ++i) {
    x.push_back(i);
    y.push_back((i % 3) - 1.0);
  }
  EXPECT_GT(fit_line(x, y).p_value, 0.05);
}

TEST(Stats, LogLogSlopeAndVariation) {
  std::vector<double> h, d;
  for (int k = 1; k <= 6; ++k) {
    h.push_back(std::ldexp(1.0, -k));
    d.push_back(5 * h.back() * h.back());
  }
  EXPECT_NEAR(log_log_slope(h, d), 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(relative_variation({1.0, 0.8, 0.9}), 0.2);
  EXPECT_DOUBLE_EQ(relative_variation({0.0, 0.0}), 0.0);
}

TEST(RandomStream, IndependentOfOrder) {
  SplitMix64 a(7, 3), b(7, 3), c(7, 4);
  EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(SplitMix64(7, 3).next(), c.next());
  SplitMix64 r(1);
  for (int i = 0; i < 1000; ++i) {
    auto v = r.uniform(-3, 5);
    EXPECT_GE(v, -3);
    EXPECT_LE(v, 5);
  }
}
