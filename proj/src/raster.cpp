#include "curvi/raster.hpp"

#include <algorithm>
#include <cmath>

#include "curvi/error.hpp"
#include "curvi/parallel.hpp"

namespace curvi {

void interpolateAttributes(const std::array<VertexAttributes, 3>& attributes, Fragment& f) {
  const auto& l = f.barycentric.values;
  f.color = attributes[0].color * l[0] + attributes[1].color * l[1] + attributes[2].color * l[2];
  f.uv = attributes[0].uv * l[0] + attributes[1].uv * l[1] + attributes[2].uv * l[2];
}

double edgeSlope(double ddx, double ddy, StepVariant variant) {
  switch (variant) {
    case StepVariant::Length:
      return std::hypot(ddx, ddy);
    case StepVariant::FWidth:
      return std::abs(ddx) + std::abs(ddy);
    case StepVariant::TwiceLength:
      return 2.0 * std::hypot(ddx, ddy);
  }
  return std::hypot(ddx, ddy);
}

double pixStep(const GradientSample& g, StepVariant variant) {
  const double slope = edgeSlope(g.ddx, g.ddy, variant);
  if (!(slope >= kDegenerateEpsilon)) {
    return g.value < 0.0 ? 0.0 : 1.0;
  }
  return std::clamp(g.value / slope + 0.5, 0.0, 1.0);
}

std::optional<BoundingBox> boundingBoxExpanded(const Vec2& a, const Vec2& b, const Vec2& c,
                                               PixelExtent extent) {
  const double lo_x = std::min({a.x, b.x, c.x});
  const double lo_y = std::min({a.y, b.y, c.y});
  const double hi_x = std::max({a.x, b.x, c.x});
  const double hi_y = std::max({a.y, b.y, c.y});

  // Work in double until clamped so huge coordinates cannot overflow int.
  const double min_x = std::max(std::ceil(lo_x - 0.5), 0.0);
  const double min_y = std::max(std::ceil(lo_y - 0.5), 0.0);
  const double max_x = std::min(std::floor(hi_x + 0.5), static_cast<double>(extent.width - 1));
  const double max_y = std::min(std::floor(hi_y + 0.5), static_cast<double>(extent.height - 1));
  if (!(min_x <= max_x) || !(min_y <= max_y)) {
    return std::nullopt;
  }
  return BoundingBox{static_cast<int>(min_x), static_cast<int>(min_y), static_cast<int>(max_x),
                     static_cast<int>(max_y)};
}

RasterStatus rasterizeRectilinear(const ProjectedTriangle& tri, PixelExtent extent,
                                  const RasterOptions& options, const FragmentSink& sink) {
  const auto& p = tri.position;
  if (!isFinite(p[0]) || !isFinite(p[1]) || !isFinite(p[2])) {
    return RasterStatus::Degenerate;
  }
  const double area2 = doubleSignedArea(p[0], p[1], p[2]);
  if (!(std::abs(area2) >= kDegenerateEpsilon)) {
    return RasterStatus::Degenerate;
  }
  if (options.cull_back_faces && area2 < 0.0) {
    return RasterStatus::Culled;
  }

  const Vec2 half{0.5, 0.5};
  const auto box = boundingBoxExpanded(p[0] - half, p[1] - half, p[2] - half, extent);
  if (!box) {
    return RasterStatus::Offscreen;
  }

  // Edge functions are built relative to an integer origin near the
  // triangle. Integer translations then leave every evaluated value
  // unchanged, and large screen coordinates keep their precision.
  const Vec2 origin{std::floor(std::min({p[0].x, p[1].x, p[2].x})),
                    std::floor(std::min({p[0].y, p[1].y, p[2].y}))};
  const std::array<Vec2, 3> local{p[0] - origin, p[1] - origin, p[2] - origin};

  EdgeMatrix raw;
  EdgeMatrix chi;
  EdgeWeights omega;
  try {
    raw = edgeMatrix(local[0], local[1], local[2]);
    // Clockwise input: flip rows so they are positive inside.
    if (area2 < 0.0) {
      for (auto& r : raw.rows) r = -r;
    }
    std::array<double, 3> slopes{};
    for (int i = 0; i < 3; ++i) {
      slopes[i] = edgeSlope(raw.rows[i].x, raw.rows[i].y, options.variant);
    }
    chi = scaleEdgeMatrix(raw, slopes);
    omega = edgeWeights(chi, local[0], local[1], local[2]);
  } catch (const DegenerateError&) {
    return RasterStatus::Degenerate;
  }

  parallelFor(box->min_y, box->max_y + 1, [&](int y) {
    const double fy = y + 0.5 - origin.y;
    for (int x = box->min_x; x <= box->max_x; ++x) {
      const Vec3 f{x + 0.5 - origin.x, fy, 1.0};
      const auto xi = chi.apply(f);

      double cov = 0.0;
      if (options.antialias) {
        cov = coverage({{std::clamp(xi[0], 0.0, 1.0), std::clamp(xi[1], 0.0, 1.0),
                         std::clamp(xi[2], 0.0, 1.0)}});
      } else {
        const auto g = raw.apply(f);
        cov = (g[0] >= 0.0 && g[1] >= 0.0 && g[2] >= 0.0) ? 1.0 : 0.0;
      }
      if (cov <= 0.0) continue;

      BarycentricTriple lambda;
      for (int i = 0; i < 3; ++i) {
        lambda.values[i] = (xi[i] - 0.5) * omega.values[i];
      }
      const auto corrected = perspectiveCorrect(lambda, tri.inv_depth);
      if (!corrected) continue;

      Fragment frag;
      frag.x = x;
      frag.y = y;
      frag.coverage = cov;
      frag.depth = corrected->w;
      frag.barycentric = corrected->corrected;
      interpolateAttributes(tri.attributes, frag);
      sink(frag);
    }
  });
  return RasterStatus::Ok;
}

}  // namespace curvi
