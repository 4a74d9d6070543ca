#include <gtest/gtest.h>

#include <cmath>

#include "curvi/raster.hpp"
#include "support/collect.hpp"
#include "support/oracles.hpp"

using namespace curvi;
using testing_support::FragmentCollector;

namespace {

ProjectedTriangle triangle(Vec2 a, Vec2 b, Vec2 c) {
  ProjectedTriangle t;
  t.position = {a, b, c};
  return t;
}

// Huge triangle with one edge through `center` at `angle_deg`; the other
// two edges are far outside any small buffer. Counter-clockwise.
ProjectedTriangle halfPlane(Vec2 center, double angle_deg) {
  const double a = radians(angle_deg);
  const Vec2 d{std::cos(a), std::sin(a)};
  const Vec2 n{-std::sin(a), std::cos(a)};
  return triangle(center - d * 1e4, center + d * 1e4, center + n * 1e4);
}

}  // namespace

TEST(PixStep, Examples) {
  EXPECT_DOUBLE_EQ(pixStep({0.0, 1.0, 0.0}, StepVariant::Length), 0.5);
  EXPECT_DOUBLE_EQ(pixStep({0.25, 1.0, 0.0}, StepVariant::Length), 0.75);
  EXPECT_DOUBLE_EQ(pixStep({1.0, 1.0, 1.0}, StepVariant::FWidth), 1.0);
  EXPECT_DOUBLE_EQ(pixStep({0.25, 1.0, 0.0}, StepVariant::TwiceLength), 0.625);
  EXPECT_DOUBLE_EQ(pixStep({-5.0, 1.0, 0.0}), 0.0);
}

TEST(PixStep, CollapsedSlopeIsHardStep) {
  EXPECT_EQ(pixStep({-1e-3, 0.0, 0.0}), 0.0);
  EXPECT_EQ(pixStep({0.0, 0.0, 0.0}), 1.0);
  EXPECT_EQ(pixStep({1e-3, 1e-14, 0.0}), 1.0);
}

TEST(PixStep, VariantOrdering) {
  oracle::Rng rng(21);
  for (int n = 0; n < 1000; ++n) {
    const double dx = rng.uniform(-3, 3);
    const double dy = rng.uniform(-3, 3);
    const double one = edgeSlope(dx, dy, StepVariant::Length);
    const double two = edgeSlope(dx, dy, StepVariant::FWidth);
    const double three = edgeSlope(dx, dy, StepVariant::TwiceLength);
    EXPECT_GE(three, one);
    EXPECT_GE(two, one * (1 - 1e-12));
    EXPECT_LE(two, three);
  }
}

TEST(BoundingBox, Examples) {
  // Vertex coordinates in the index convention (center of pixel i at i).
  auto box = boundingBoxExpanded({0.3, 0.3}, {2.6, 0.4}, {1.0, 3.1}, {64, 64});
  ASSERT_TRUE(box);
  EXPECT_EQ(box->min_x, 0);
  EXPECT_EQ(box->min_y, 0);
  EXPECT_EQ(box->max_x, 3);
  EXPECT_EQ(box->max_y, 3);

  box = boundingBoxExpanded({1, 1}, {4, 1}, {1, 4}, {64, 64});
  ASSERT_TRUE(box);
  EXPECT_EQ(box->min_x, 1);
  EXPECT_EQ(box->min_y, 1);
  EXPECT_EQ(box->max_x, 4);
  EXPECT_EQ(box->max_y, 4);

  EXPECT_FALSE(boundingBoxExpanded({-5, 0}, {-2, 1}, {-3, 4}, {64, 64}));
}

TEST(BoundingBox, ClampedToExtent) {
  const auto box = boundingBoxExpanded({-10, -10}, {100, -10}, {-10, 100}, {16, 8});
  ASSERT_TRUE(box);
  EXPECT_EQ(box->min_x, 0);
  EXPECT_EQ(box->max_x, 15);
  EXPECT_EQ(box->max_y, 7);
}

TEST(Rectilinear, CentroidPixel) {
  FragmentCollector out;
  const auto t = triangle({0.5, 0.5}, {63.5, 0.5}, {0.5, 63.5});
  ASSERT_EQ(rasterizeRectilinear(t, {64, 64}, {}, out.sink()), RasterStatus::Ok);
  const Fragment* f = out.find(21, 21);
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->coverage, 1.0);
  for (double v : f->barycentric.values) EXPECT_NEAR(v, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(f->depth, 1.0, 1e-12);
}

TEST(Rectilinear, PixelOnEdgeIsHalfCovered) {
  FragmentCollector out;
  rasterizeRectilinear(triangle({0.5, 0.5}, {63.5, 0.5}, {0.5, 63.5}), {64, 64}, {}, out.sink());
  EXPECT_DOUBLE_EQ(out.coverage(20, 0), 0.5);
}

TEST(Rectilinear, HalfPlaneMatchesSupersampling) {
  for (double angle : {0.0, 15.0, 30.0, 45.0}) {
    FragmentCollector out;
    const auto t = halfPlane({32.2, 31.7}, angle);
    rasterizeRectilinear(t, {64, 64}, {}, out.sink());
    double sum = 0.0;
    double worst = 0.0;
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        const double e = std::abs(out.coverage(x, y) - oracle::supersampledCoverage(t.position, x, y));
        sum += e;
        worst = std::max(worst, e);
      }
    }
    EXPECT_LE(sum / (64 * 64), 0.03) << angle;
    EXPECT_LE(worst, 0.15) << angle;
  }
}

TEST(Rectilinear, SharedEdgeConservation) {
  oracle::Rng rng(22);
  for (int n = 0; n < 20; ++n) {
    const Vec2 a = rng.point(8, 56);
    const Vec2 b = rng.point(8, 56);
    if (length(b - a) < 20) continue;
    const Vec2 d = normalize(b - a);
    const Vec2 normal{-d.y, d.x};
    const Vec2 mid = (a + b) * 0.5;
    const Vec2 c = mid + normal * rng.uniform(15, 30);
    const Vec2 e = mid - normal * rng.uniform(15, 30);
    FragmentCollector one;
    FragmentCollector two;
    rasterizeRectilinear(triangle(a, b, c), {64, 64}, {}, one.sink());
    rasterizeRectilinear(triangle(b, a, e), {64, 64}, {}, two.sink());

    auto distanceToSegment = [](Vec2 p, Vec2 s0, Vec2 s1) {
      const Vec2 v = s1 - s0;
      const double t = std::clamp(dot(p - s0, v) / dot(v, v), 0.0, 1.0);
      return length(p - (s0 + v * t));
    };
    int checked = 0;
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        const Vec2 p{x + 0.5, y + 0.5};
        if (distanceToSegment(p, a, b) > 0.5) continue;
        if (std::min({distanceToSegment(p, b, c), distanceToSegment(p, c, a),
                      distanceToSegment(p, a, e), distanceToSegment(p, e, b)}) <= 1.0) {
          continue;
        }
        EXPECT_NEAR(one.coverage(x, y) + two.coverage(x, y), 1.0, 1e-6);
        ++checked;
      }
    }
    EXPECT_GT(checked, 0);
  }
}

TEST(Rectilinear, InteriorSaturation) {
  FragmentCollector out;
  const auto t = triangle({3.3, 2.1}, {60.2, 10.7}, {20.9, 58.4});
  rasterizeRectilinear(t, {64, 64}, {}, out.sink());
  const auto chi = normalizeEdgeMatrix(edgeMatrix(t.position[0], t.position[1], t.position[2]));
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const auto g = chi.apply(Vec2{x + 0.5, y + 0.5});
      // More than one pixel inside every edge.
      if (g[0] - 0.5 > 1.0 && g[1] - 0.5 > 1.0 && g[2] - 0.5 > 1.0) {
        EXPECT_EQ(out.coverage(x, y), 1.0);
      }
    }
  }
}

TEST(Rectilinear, IntegerTranslationIsBitExact) {
  oracle::Rng rng(23);
  for (int n = 0; n < 50; ++n) {
    // Dyadic coordinates so that the translated input is an exact translate.
    auto q = [&] { return std::round(rng.uniform(2, 40) * 1024.0) / 1024.0; };
    const auto t = triangle({q(), q()}, {q(), q()}, {q(), q()});
    const int dx = rng.integer(-2, 20);
    const int dy = rng.integer(-2, 20);
    auto moved = t;
    for (auto& p : moved.position) p = p + Vec2{double(dx), double(dy)};

    FragmentCollector a;
    FragmentCollector b;
    if (rasterizeRectilinear(t, {128, 128}, {}, a.sink()) != RasterStatus::Ok) continue;
    rasterizeRectilinear(moved, {128, 128}, {}, b.sink());
    for (const auto& [px, f] : a.fragments()) {
      const Fragment* g = b.find(px.first + dx, px.second + dy);
      if (!(px.first + dx >= 0 && px.second + dy >= 0)) continue;
      ASSERT_NE(g, nullptr);
      EXPECT_EQ(f.coverage, g->coverage);
      EXPECT_EQ(f.barycentric.values, g->barycentric.values);
    }
  }
}

TEST(Rectilinear, AliasedModeIsSignTest) {
  oracle::Rng rng(24);
  RasterOptions opts;
  opts.antialias = false;
  for (int n = 0; n < 50; ++n) {
    const auto t = triangle(rng.point(-5, 37), rng.point(-5, 37), rng.point(-5, 37));
    if (std::abs(oracle::twiceArea(t.position[0], t.position[1], t.position[2])) < 1) continue;
    FragmentCollector out;
    rasterizeRectilinear(t, {32, 32}, opts, out.sink());
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        const double c = out.coverage(x, y);
        EXPECT_TRUE(c == 0.0 || c == 1.0);
        const bool inside = oracle::insideTriangle({x + 0.5, y + 0.5}, t.position[0],
                                                   t.position[1], t.position[2]);
        EXPECT_EQ(c == 1.0, inside) << x << "," << y;
      }
    }
  }
}

TEST(Rectilinear, BothWindingsGiveSameCoverage) {
  FragmentCollector ccw;
  FragmentCollector cw;
  rasterizeRectilinear(triangle({3.3, 2.1}, {60.2, 10.7}, {20.9, 58.4}), {64, 64}, {}, ccw.sink());
  rasterizeRectilinear(triangle({3.3, 2.1}, {20.9, 58.4}, {60.2, 10.7}), {64, 64}, {}, cw.sink());
  ASSERT_EQ(ccw.fragments().size(), cw.fragments().size());
  for (const auto& [px, f] : ccw.fragments()) {
    EXPECT_NEAR(f.coverage, cw.coverage(px.first, px.second), 1e-12);
  }
}

TEST(Rectilinear, CullingDropsClockwise) {
  FragmentCollector out;
  RasterOptions opts;
  opts.cull_back_faces = true;
  EXPECT_EQ(rasterizeRectilinear(triangle({3, 2}, {20, 58}, {60, 10}), {64, 64}, opts, out.sink()),
            RasterStatus::Culled);
  EXPECT_TRUE(out.fragments().empty());
}

TEST(Rectilinear, DegenerateAndOffscreen) {
  FragmentCollector out;
  EXPECT_EQ(rasterizeRectilinear(triangle({1, 1}, {5, 5}, {9, 9}), {64, 64}, {}, out.sink()),
            RasterStatus::Degenerate);
  EXPECT_EQ(rasterizeRectilinear(triangle({-9, 1}, {-5, 5}, {-9, 9}), {64, 64}, {}, out.sink()),
            RasterStatus::Offscreen);
  EXPECT_TRUE(out.fragments().empty());
}

TEST(Rectilinear, PerspectiveCorrectDepth) {
  // Depth along a screen-space edge follows 1/z interpolation.
  auto t = triangle({0.5, 0.5}, {63.5, 0.5}, {0.5, 63.5});
  t.inv_depth = {1.0, 1.0 / 3.0, 1.0};
  FragmentCollector out;
  rasterizeRectilinear(t, {64, 64}, {}, out.sink());
  const Fragment* f = out.find(32, 0);  // on edge AB, 32/63 of the way to B
  ASSERT_NE(f, nullptr);
  const double lb = 32.0 / 63.0;
  EXPECT_NEAR(f->depth, 1.0 / ((1.0 - lb) + lb / 3.0), 1e-12);
  EXPECT_NEAR(f->barycentric.sum(), 1.0, 1e-12);
}
