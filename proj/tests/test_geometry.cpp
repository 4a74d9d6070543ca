#include <gtest/gtest.h>

#include <cmath>

#include "curvi/error.hpp"
#include "curvi/geometry.hpp"
#include "support/oracles.hpp"

using namespace curvi;

namespace {

void expectRow(const Vec3& r, double x, double y, double z, double tol = 1e-12) {
  EXPECT_NEAR(r.x, x, tol);
  EXPECT_NEAR(r.y, y, tol);
  EXPECT_NEAR(r.z, z, tol);
}

// Random triangle with area well above the degeneracy guard.
std::array<Vec2, 3> randomTriangle(oracle::Rng& rng, double lo = -50.0, double hi = 50.0) {
  while (true) {
    std::array<Vec2, 3> t{rng.point(lo, hi), rng.point(lo, hi), rng.point(lo, hi)};
    if (std::abs(oracle::twiceArea(t[0], t[1], t[2])) > 1.0) return t;
  }
}

}  // namespace

TEST(EdgeMatrix, UnitTriangleRows) {
  const auto chi = edgeMatrix({0, 0}, {1, 0}, {0, 1});
  expectRow(chi.rows[0], -1, -1, 1);
  expectRow(chi.rows[1], 1, 0, 0);
  expectRow(chi.rows[2], 0, 1, 0);
  EXPECT_FALSE(chi.normalized);
}

TEST(EdgeMatrix, InteriorSignAndEdgeZero) {
  const auto chi = edgeMatrix({0, 0}, {1, 0}, {0, 1});
  EXPECT_GT(chi.apply(Vec2{0, 0})[0], 0.0);
  EXPECT_EQ(chi.apply(Vec2{0, 0.5})[1], 0.0);
}

TEST(EdgeMatrix, CollinearIsDegenerate) {
  EXPECT_THROW(edgeMatrix({0, 0}, {1, 1}, {2, 2}), DegenerateError);
}

TEST(NormalizeEdgeMatrix, HandNormalizedRows) {
  EdgeMatrix raw{{Vec3{-1, -1, 1}, Vec3{2, 0, -1}, Vec3{0, 3, 0}}, false};
  const auto n = normalizeEdgeMatrix(raw);
  const double r = 1.0 / std::sqrt(2.0);
  expectRow(n.rows[0], -r, -r, r + 0.5);
  expectRow(n.rows[1], 1, 0, 0);
  expectRow(n.rows[2], 0, 1, 0.5);
  EXPECT_TRUE(n.normalized);
  EXPECT_NEAR(n.apply(Vec2{0.5, 0.5})[0], 0.5, 1e-15);
}

TEST(NormalizeEdgeMatrix, ZeroSlopeRowIsDegenerate) {
  EdgeMatrix raw{{Vec3{0, 0, 1}, Vec3{1, 0, 0}, Vec3{0, 1, 0}}, false};
  EXPECT_THROW(normalizeEdgeMatrix(raw), DegenerateError);
}

TEST(NormalizeEdgeMatrix, UnitSlopeAlongEdgeNormal) {
  oracle::Rng rng(11);
  for (int n = 0; n < 200; ++n) {
    const auto t = randomTriangle(rng);
    const auto chi = normalizeEdgeMatrix(edgeMatrix(t[0], t[1], t[2]));
    for (int i = 0; i < 3; ++i) {
      const Vec2 normal = normalize(Vec2{chi.rows[i].x, chi.rows[i].y});
      const Vec2 p = rng.point(-50, 50);
      const double d = chi.apply(p + normal)[i] - chi.apply(p)[i];
      EXPECT_NEAR(d, 1.0, 1e-9);
    }
  }
}

TEST(BarycentricPlanar, UnitTriangle) {
  const auto m = barycentricMatrixPlanar({0, 0}, {1, 0}, {0, 1});
  expectRow(m.rows[0], -1, -1, 1);
  expectRow(m.rows[1], 1, 0, 0);
  expectRow(m.rows[2], 0, 1, 0);
  const auto c = m.apply(Vec2{1.0 / 3.0, 1.0 / 3.0});
  for (double v : c) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
  const auto b = m.apply(Vec2{1, 0});
  EXPECT_EQ(b[0], 0.0);
  EXPECT_EQ(b[1], 1.0);
  EXPECT_EQ(b[2], 0.0);
}

TEST(BarycentricPlanar, MatchesAreaRatios) {
  oracle::Rng rng(12);
  for (int n = 0; n < 1000; ++n) {
    const auto t = randomTriangle(rng);
    const auto m = barycentricMatrixPlanar(t[0], t[1], t[2]);
    const Vec2 p = rng.point(-60, 60);
    const auto got = m.apply(p);
    const auto want = oracle::areaBarycentric(p, t[0], t[1], t[2]);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], want[i], 1e-9);
  }
}

TEST(BarycentricPlanar, PartitionOfUnityAndVertexIdentities) {
  oracle::Rng rng(13);
  for (int n = 0; n < 1000; ++n) {
    const auto t = randomTriangle(rng);
    const auto m = barycentricMatrixPlanar(t[0], t[1], t[2]);
    const auto l = m.apply(rng.point(-100, 100));
    EXPECT_NEAR(l[0] + l[1] + l[2], 1.0, 1e-9);
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(m.apply(t[i])[i], 1.0, 1e-9);
      // Midpoint of the edge opposite vertex i.
      const Vec2 mid = (t[(i + 1) % 3] + t[(i + 2) % 3]) * 0.5;
      EXPECT_NEAR(m.apply(mid)[i], 0.0, 1e-9);
    }
  }
}

TEST(BarycentricPlanar, WindingIndependent) {
  oracle::Rng rng(14);
  for (int n = 0; n < 100; ++n) {
    const auto t = randomTriangle(rng);
    const auto abc = barycentricMatrixPlanar(t[0], t[1], t[2]);
    const auto acb = barycentricMatrixPlanar(t[0], t[2], t[1]);
    const Vec2 p = rng.point(-50, 50);
    const auto l1 = abc.apply(p);
    const auto l2 = acb.apply(p);
    EXPECT_NEAR(l1[0], l2[0], 1e-9);
    EXPECT_NEAR(l1[1], l2[2], 1e-9);
    EXPECT_NEAR(l1[2], l2[1], 1e-9);
  }
}

TEST(BarycentricPlanar, DegenerateThrows) {
  EXPECT_THROW(barycentricMatrixPlanar({0, 0}, {1, 0}, {2, 0}), DegenerateError);
}

TEST(BarycentricSpherical, AxisTriangle) {
  const auto m = barycentricMatrixSpherical({1, 0, 0}, {0, 1, 0}, {0, 0, 1});
  expectRow(m.rows[0], 1, 0, 0);
  expectRow(m.rows[1], 0, 1, 0);
  expectRow(m.rows[2], 0, 0, 1);
  const auto a = m.apply(Vec3{1, 0, 0});
  EXPECT_NEAR(a[0], 1.0, 1e-15);
  EXPECT_NEAR(a[1], 0.0, 1e-15);
  const auto g = m.apply(normalize(Vec3{1, 1, 1}));
  for (double v : g) EXPECT_NEAR(v, 0.5774, 1e-4);
}

TEST(BarycentricSpherical, UnitAtOwnVertexDirection) {
  oracle::Rng rng(15);
  for (int n = 0; n < 200; ++n) {
    const Vec3 a = rng.direction() * rng.uniform(0.5, 10);
    const Vec3 b = rng.direction() * rng.uniform(0.5, 10);
    const Vec3 c = rng.direction() * rng.uniform(0.5, 10);
    if (std::abs(dot(normalize(a), cross(b, c))) < 1e-3) continue;
    const auto m = barycentricMatrixSpherical(a, b, c);
    EXPECT_NEAR(m.apply(normalize(a))[0], 1.0, 1e-9);
    EXPECT_NEAR(m.apply(normalize(b))[1], 1.0, 1e-9);
    EXPECT_NEAR(m.apply(normalize(c))[0], 0.0, 1e-9);
  }
}

TEST(BarycentricSpherical, PlaneThroughEyeIsDegenerate) {
  EXPECT_THROW(barycentricMatrixSpherical({1, 0, 0}, {0, 1, 0}, {1, 1, 0}), DegenerateError);
}

TEST(EdgeWeights, RawUnitTriangle) {
  const auto chi = edgeMatrix({0, 0}, {1, 0}, {0, 1});
  const auto w = edgeWeights(chi, {0, 0}, {1, 0}, {0, 1});
  for (double v : w.values) EXPECT_DOUBLE_EQ(v, 1.0);

  EdgeMatrix scaled = chi;
  scaled.rows[0] = scaled.rows[0] * 2.0;
  EXPECT_DOUBLE_EQ(edgeWeights(scaled, {0, 0}, {1, 0}, {0, 1}).values[0], 0.5);

  const auto l = chi.apply(Vec2{1.0 / 3.0, 1.0 / 3.0});
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(l[i] * w.values[i], 1.0 / 3.0, 1e-15);
}

TEST(EdgeWeights, NormalizedPathMatchesBarycentricMatrix) {
  oracle::Rng rng(16);
  for (int n = 0; n < 500; ++n) {
    const auto t = randomTriangle(rng);
    const auto chi = normalizeEdgeMatrix(edgeMatrix(t[0], t[1], t[2]));
    const auto w = edgeWeights(chi, t[0], t[1], t[2]);
    const auto m = barycentricMatrixPlanar(t[0], t[1], t[2]);
    const Vec2 p = rng.point(-50, 50);
    const auto xi = chi.apply(p);
    const auto l = m.apply(p);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR((xi[i] - 0.5) * w.values[i], l[i], 1e-9);
  }
}

TEST(Coverage, Products) {
  EXPECT_EQ(coverage({{1, 1, 1}}), 1.0);
  EXPECT_EQ(coverage({{0.5, 1, 1}}), 0.5);
  EXPECT_EQ(coverage({{0, 0.7, 1}}), 0.0);
}

TEST(PerspectiveCorrect, Examples) {
  auto s = perspectiveCorrect({{1.0 / 3, 1.0 / 3, 1.0 / 3}}, {0.5, 0.5, 0.5});
  ASSERT_TRUE(s);
  EXPECT_NEAR(s->w, 2.0, 1e-15);
  for (double v : s->corrected.values) EXPECT_NEAR(v, 1.0 / 3, 1e-15);
  EXPECT_TRUE(s->corrected.corrected);

  s = perspectiveCorrect({{0.5, 0.5, 0.0}}, {1.0, 1.0 / 3.0, 0.25});
  ASSERT_TRUE(s);
  EXPECT_NEAR(s->w, 1.5, 1e-15);
  EXPECT_NEAR(s->corrected.values[0], 0.75, 1e-15);
  EXPECT_NEAR(s->corrected.values[1], 0.25, 1e-15);
  EXPECT_EQ(s->corrected.values[2], 0.0);

  s = perspectiveCorrect({{1, 0, 0}}, {0.2, 1, 1});
  ASSERT_TRUE(s);
  EXPECT_NEAR(s->w, 5.0, 1e-14);
  EXPECT_NEAR(s->corrected.values[0], 1.0, 1e-15);
}

TEST(PerspectiveCorrect, RaySegmentOracle) {
  // Segment from A=(−1, 0, 1) to B=(1, 0, 3); the ray through the screen
  // midpoint of their projections hits the segment at depth 1.5.
  const Vec3 a{-1, 0, 1};
  const Vec3 b{1, 0, 3};
  const double sa = a.x / a.z;
  const double sb = b.x / b.z;
  const double sm = 0.5 * (sa + sb);
  // Intersect x = sm·z with the segment a + τ(b − a).
  const double tau = (sm * a.z - a.x) / ((b.x - a.x) - sm * (b.z - a.z));
  const double depth = a.z + tau * (b.z - a.z);
  const auto s = perspectiveCorrect({{0.5, 0.5, 0.0}}, {1.0 / a.z, 1.0 / b.z, 1.0});
  ASSERT_TRUE(s);
  EXPECT_NEAR(s->w, depth, 1e-12);
  EXPECT_NEAR(s->corrected.values[1], tau, 1e-12);
}

TEST(PerspectiveCorrect, BehindEyeIsEmpty) {
  EXPECT_FALSE(perspectiveCorrect({{1, 0, 0}}, {-1, 1, 1}));
  EXPECT_FALSE(perspectiveCorrect({{0, 0, 0}}, {1, 1, 1}));
}
