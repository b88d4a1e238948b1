#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "mahler/cube_flags.hpp"
#include "mahler/polytope.hpp"
#include "support.hpp"

using namespace mahler;

namespace {

using Q = Rational;
using V = Vector<Q>;

Q q(long p, long r = 1) { return ratio<Q>(p, r); }

AlphaWeights<Q> random_weights(SplitMix64& rng, int n) {
  return AlphaWeights<Q>(n, [&](const CubeFace&) { return Q(Q(rng.uniform(1, 12)) / Q(rng.uniform(1, 12))); });
}

long factorial_long(int n) { return n <= 1 ? 1 : n * factorial_long(n - 1); }

}  // namespace

TEST(Faces, Counts) {
  EXPECT_EQ(enumerate_faces(1).size(), 2u);
  EXPECT_EQ(enumerate_faces(2).size(), 8u);
  EXPECT_EQ(enumerate_faces(3).size(), 26u);
  for (int n = 1; n <= 6; ++n) EXPECT_EQ(enumerate_faces(n).size(), face_count(n));
}

TEST(Faces, LexicographicOrderAndDimensions) {
  auto faces = enumerate_faces(3);
  for (std::size_t i = 1; i < faces.size(); ++i) EXPECT_LT(faces[i - 1], faces[i]);
  std::vector<int> by_dim(3, 0);
  for (const auto& f : faces) ++by_dim[f.dim()];
  EXPECT_EQ(by_dim, (std::vector<int>{8, 12, 6}));
}

TEST(Faces, CodeRoundTrip) {
  for (const auto& f : enumerate_faces(4)) EXPECT_EQ(CubeFace::from_code(4, f.code()), f);
}

TEST(Faces, Containment) {
  CubeFace vertex({1, 1, -1}), edge({1, 0, -1}), facet({0, 0, -1}), other({0, 0, 1});
  EXPECT_TRUE(vertex.is_subface_of(edge));
  EXPECT_TRUE(edge.is_subface_of(facet));
  EXPECT_TRUE(vertex.is_subface_of(facet));
  EXPECT_FALSE(facet.is_subface_of(edge));
  EXPECT_FALSE(vertex.is_subface_of(other));
}

TEST(Faces, RejectsDimensionOverCap) { EXPECT_THROW(enumerate_faces(kMaxCubeDimension + 1), std::invalid_argument); }

TEST(Faces, DualCenters) {
  EXPECT_EQ(CubeFace({1, 0, 0}).dual_center<Q>(), (V{q(1), q(0), q(0)}));
  EXPECT_EQ(CubeFace({1, 1, 1}).dual_center<Q>(), (V{q(1, 3), q(1, 3), q(1, 3)}));
  EXPECT_EQ(CubeFace({1, -1}).dual_center<Q>(), (V{q(1, 2), q(-1, 2)}));
}

TEST(Faces, DualCenterLiesInDualFace) {
  // c*_F . x = 1 on every vertex x of F, and c*_F has l1 norm 1.
  for (const auto& f : enumerate_faces(3)) {
    const V c = f.dual_center<Q>();
    EXPECT_EQ(norm1(c), q(1));
    for (const auto& v : enumerate_faces(3))
      if (v.dim() == 0 && v.is_subface_of(f)) {
        EXPECT_EQ(dot(c, v.center<Q>()), q(1));
      }
  }
}

TEST(Flags, Counts) {
  EXPECT_EQ(enumerate_flags(1).size(), 2u);
  EXPECT_EQ(enumerate_flags(2).size(), 8u);
  EXPECT_EQ(enumerate_flags(3).size(), 48u);
  for (int n = 1; n <= 6; ++n) EXPECT_EQ(enumerate_flags(n).size(), static_cast<std::size_t>((1L << n) * factorial_long(n)));
}

TEST(Flags, ChainsAreStrictlyIncreasing) {
  std::set<std::vector<int>> seen;
  for (const auto& fl : enumerate_flags(4)) {
    auto faces = fl.faces();
    ASSERT_EQ(faces.size(), 4u);
    std::vector<int> codes;
    for (int j = 0; j < 4; ++j) {
      EXPECT_EQ(faces[j].dim(), j);
      if (j > 0) {
        EXPECT_TRUE(faces[j - 1].is_subface_of(faces[j]));
      }
      codes.push_back(faces[j].code());
    }
    EXPECT_TRUE(seen.insert(codes).second);
  }
}

TEST(Flags, OrientationMatchesDeterminantSign) {
  for (int n = 1; n <= 4; ++n)
    for (const auto& fl : enumerate_flags(n)) {
      std::vector<V> cols;
      for (const auto& f : fl.faces()) cols.push_back(f.center<Q>());
      EXPECT_EQ(sign(determinant_of_columns(cols)), fl.orientation());
    }
}

TEST(FlagSimplex, PlanarExample) {
  Flag fl{{1, 1}, {1, 0}};
  auto x = base_points<Q>(2);
  EXPECT_EQ(fl.face(0), CubeFace({1, 1}));
  EXPECT_EQ(fl.face(1), CubeFace({1, 0}));
  EXPECT_EQ(flag_simplex_signed_volume(x, fl), q(1, 2));
}

TEST(FlagSimplex, BaseVolumesInThreeDimensions) {
  auto x = base_points<Q>(3);
  for (const auto& v : flag_simplex_volumes(x)) EXPECT_EQ(v, q(1, 6));
}

TEST(FlagSimplex, ZeroVertexGivesZero) {
  auto x = base_points<Q>(3);
  for (const auto& f : enumerate_faces(3))
    if (f.dim() == 0) x[f] = V(3, q(0));
  for (const auto& v : flag_simplex_volumes(x)) EXPECT_EQ(v, q(0));
}

TEST(GVolume, TilingIdentities) {
  for (int n = 1; n <= 5; ++n) {
    EXPECT_EQ(g_volume(base_points<Q>(n)), power(q(2), n));
    EXPECT_EQ(g_volume(base_dual_points<Q>(n)), power(q(2), n) / factorial<Q>(n));
  }
}

TEST(GVolume, TilingMatchesPolytopeVolume) {
  for (int n = 2; n <= 4; ++n) {
    EXPECT_EQ(g_volume(base_points<Q>(n)), volume(VPolytope<Q>::cube(n)));
    EXPECT_EQ(g_volume(base_dual_points<Q>(n)), volume(VPolytope<Q>::cross_polytope(n)));
  }
}

TEST(GVolume, ReflectionAcrossCoordinateHyperplane) {
  // Moving x_F by +t e_j or -t e_j, e_j orthogonal to c_F, gives equal volume.
  for (int n = 2; n <= 3; ++n)
    for (const auto& f : enumerate_faces(n))
      for (int j : f.free_coordinates()) {
        auto plus = base_points<Q>(n), minus = base_points<Q>(n);
        plus[f] = plus[f] + scaled(unit_vector<Q>(n, j), q(1, 7));
        minus[f] = minus[f] - scaled(unit_vector<Q>(n, j), q(1, 7));
        EXPECT_EQ(g_volume(plus), g_volume(minus));
      }
}

TEST(GVolume, EqualsHullVolumeForLinearImagesOfTheBase) {
  SplitMix64 rng(2);
  for (int n = 2; n <= 3; ++n)
    for (int t = 0; t < 5; ++t) {
      Matrix<Q> m = Matrix<Q>::identity(n);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) m(i, k) += Q(Q(rng.uniform(-5, 5)) / Q(100 * n));
      FlagPoints<Q> x(n, [&](const CubeFace& f) { return m * f.center<Q>(); });
      EXPECT_EQ(g_volume(x), volume(VPolytope<Q>(n, flag_point_list(x))));
    }
}

TEST(GVolume, EqualsUnionVolumeNearTheBase) {
  // Grid estimate of the union of flag simplices for perturbations of radius
  // at most 0.05.
  constexpr double kRadius = 0.05;
  SplitMix64 rng(4);
  for (int t = 0; t < 3; ++t) {
    FlagPoints<double> x(2, [&](const CubeFace& f) {
      auto c = f.center<double>();
      for (auto& v : c) v += kRadius * (rng.uniform(-1000, 1000) / 1000.0) / std::sqrt(2.0);
      return c;
    });
    const int m = 600;
    long inside = 0;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        Vector<double> p{-1.1 + (a + 0.5) * 2.2 / m, -1.1 + (b + 0.5) * 2.2 / m};
        if (flag_union_contains(x, p)) ++inside;
      }
    EXPECT_NEAR(g_volume(x), 2.2 * 2.2 * inside / (double(m) * m), 0.02);
  }
}

TEST(QPair, ConstantWeights) {
  auto one = build_Q_pair(AlphaWeights<Q>(3, [](const CubeFace&) { return q(1); }));
  EXPECT_EQ(one.primal, base_points<Q>(3));
  EXPECT_EQ(one.dual, base_dual_points<Q>(3));
  auto two = build_Q_pair(AlphaWeights<Q>(2, [](const CubeFace&) { return q(2); }));
  for (const auto& f : enumerate_faces(2)) {
    EXPECT_EQ(two.primal[f], scaled(f.center<Q>(), q(2)));
    EXPECT_EQ(two.dual[f], scaled(f.dual_center<Q>(), q(1, 2)));
  }
}

TEST(QPair, ScalarIdentity) {
  SplitMix64 rng(6);
  auto w = random_weights(rng, 3);
  auto pair = build_Q_pair(w);
  for (const auto& f : enumerate_faces(3)) {
    const auto s = f.support();
    EXPECT_EQ(pair.primal[f][s[0]] * pair.dual[f][s[0]] * Q(f.codim()), q(1));
  }
}

TEST(QPair, RejectsNonpositiveWeights) {
  EXPECT_THROW(build_Q_pair(AlphaWeights<Q>(2, [](const CubeFace&) { return q(0); })), std::invalid_argument);
}

TEST(Lemma7, PerFlagProductIsFlagIndependent) {
  SplitMix64 rng(7);
  for (int n = 2; n <= 3; ++n)
    for (int t = 0; t < 20; ++t) {
      auto pair = build_Q_pair(random_weights(rng, n));
      auto a = flag_simplex_volumes(pair.primal);
      auto b = flag_simplex_volumes(pair.dual);
      const Q first = a[0] * b[0];
      for (std::size_t k = 1; k < a.size(); ++k) ASSERT_EQ(a[k] * b[k], first);
      EXPECT_EQ(first, cube_mahler_product<Q>(n) / Q(a.size() * a.size()));
    }
}

TEST(Lemma7, GapIsNonnegative) {
  SplitMix64 rng(8);
  for (int n = 2; n <= 3; ++n)
    for (int t = 0; t < 100; ++t) EXPECT_GE(lemma7_gap(random_weights(rng, n)), q(0));
}

TEST(Lemma7, GapVanishesAtConstantWeights) {
  for (int n = 1; n <= 4; ++n)
    for (long c : {1L, 2L, 5L}) EXPECT_EQ(lemma7_gap(AlphaWeights<Q>(n, [&](const CubeFace&) { return q(c, 3); })), q(0));
}

TEST(Lemma7, DimensionDependentWeights) {
  std::vector<Q> a{q(2), q(1)};
  auto w = AlphaWeights<Q>(2, [&](const CubeFace& f) { return a[f.dim()]; });
  // Every flag simplex scales by a_0 a_1 and its dual by 1/(a_0 a_1).
  EXPECT_EQ(g_volume(build_Q_pair(w).primal), q(8));
  EXPECT_EQ(lemma7_gap(w), q(0));
}

TEST(FaceMap, AntisymmetryOfBasePoints) {
  EXPECT_TRUE(is_antisymmetric(base_points<Q>(3)));
  auto x = base_points<Q>(3);
  x[CubeFace({1, 0, 0})] = V{q(2), q(0), q(0)};
  EXPECT_FALSE(is_antisymmetric(x));
}

TEST(FlagUnion, ContainsAndExcludes) {
  auto x = base_points<Q>(2);
  EXPECT_TRUE(flag_union_contains(x, V{q(1), q(1)}));
  EXPECT_TRUE(flag_union_contains(x, V{q(1, 2), q(-1, 3)}));
  EXPECT_FALSE(flag_union_contains(x, V{q(101, 100), q(0)}));
  EXPECT_TRUE(flag_union_contains(x, V{q(101, 100), q(0)}, q(102, 100)));
}
