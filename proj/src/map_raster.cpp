#include "curvi/map_raster.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <tuple>
#include <type_traits>

#include "curvi/error.hpp"
#include "curvi/parallel.hpp"

namespace curvi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr StBox kEmptyBox{kInf, kInf, -kInf, -kInf};
constexpr int kLeafLevel = 3;  // 8×8 pixel tiles

StBox unite(const StBox& a, const StBox& b) {
  return {std::min(a.min_s, b.min_s), std::min(a.min_t, b.min_t), std::max(a.max_s, b.max_s),
          std::max(a.max_t, b.max_t)};
}

// Sorting vertices lexicographically makes the arithmetic independent of
// the order (and so the winding) the caller supplied.
template <typename P>
std::array<int, 3> canonicalOrder(const std::array<P, 3>& p) {
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if constexpr (std::is_same_v<P, Vec2>) {
      return std::tie(p[a].x, p[a].y) < std::tie(p[b].x, p[b].y);
    } else {
      return std::tie(p[a].x, p[a].y, p[a].z) < std::tie(p[b].x, p[b].y, p[b].z);
    }
  });
  return order;
}

template <typename T>
std::array<T, 3> permute(const std::array<T, 3>& v, const std::array<int, 3>& order) {
  return {v[order[0]], v[order[1]], v[order[2]]};
}

void emit(const std::array<int, 3>& order, const std::array<VertexAttributes, 3>& attributes,
          int x, int y, double cov, const PerspectiveSample& s, const FragmentSink& sink) {
  Fragment frag;
  frag.x = x;
  frag.y = y;
  frag.coverage = cov;
  frag.depth = s.w;
  frag.barycentric = s.corrected;
  interpolateAttributes(attributes, frag);
  for (int i = 0; i < 3; ++i) {
    frag.barycentric.values[order[i]] = s.corrected.values[i];
  }
  sink(frag);
}

bool allFinite(const std::array<double, 3>& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

}  // namespace

MapJacobian mapJacobian(const STMap& map, int x, int y) {
  const auto d = centralDifferences(map.texels, [&](int i, int j) { return map.valid(i, j); }, x, y);
  return {d.ddx.x, d.ddy.x, d.ddx.y, d.ddy.y};
}

SphereJacobian mapJacobian(const PerspectiveMap& map, int x, int y) {
  const auto d =
      centralDifferences(map.directions, [&](int i, int j) { return map.valid(i, j); }, x, y);
  return {d.ddx, d.ddy};
}

StBox triangleBox(const ProjectedTriangle& tri) {
  const auto& p = tri.position;
  return {std::min({p[0].x, p[1].x, p[2].x}), std::min({p[0].y, p[1].y, p[2].y}),
          std::max({p[0].x, p[1].x, p[2].x}), std::max({p[0].y, p[1].y, p[2].y})};
}

StBox pixelFootprint(const STMap& map, int x, int y) {
  if (!map.valid(x, y)) return kEmptyBox;
  const Vec2 st = map.texels(x, y);
  const MapJacobian j = mapJacobian(map, x, y);
  const double hs = 0.5 * std::hypot(j.ds_dx, j.ds_dy);
  const double ht = 0.5 * std::hypot(j.dt_dx, j.dt_dy);
  return {st.x - hs, st.y - ht, st.x + hs, st.y + ht};
}

bool testBB(const StBox& f, const StBox& box) {
  return f.min_s >= box.min_s && f.min_t >= box.min_t && f.max_s < box.max_s &&
         f.max_t < box.max_t;
}

bool footprintOverlaps(const StBox& f, const StBox& box) {
  return f.min_s <= box.max_s && f.max_s >= box.min_s && f.min_t <= box.max_t &&
         f.max_t >= box.min_t;
}

MinMaxPyramid buildMinMaxPyramid(const STMap& map) {
  MinMaxPyramid pyr;
  Grid<StBox> base(map.width(), map.height(), kEmptyBox);
  parallelFor(0, map.height(), [&](int y) {
    for (int x = 0; x < map.width(); ++x) base(x, y) = pixelFootprint(map, x, y);
  });
  pyr.empty_ = std::none_of(base.cells().begin(), base.cells().end(),
                            [](const StBox& b) { return b.min_s <= b.max_s; });
  pyr.levels_.push_back(std::move(base));
  while (pyr.levels_.back().width() > 1 || pyr.levels_.back().height() > 1) {
    const Grid<StBox>& child = pyr.levels_.back();
    Grid<StBox> parent((child.width() + 1) / 2, (child.height() + 1) / 2, kEmptyBox);
    for (int y = 0; y < child.height(); ++y) {
      for (int x = 0; x < child.width(); ++x) {
        parent(x / 2, y / 2) = unite(parent(x / 2, y / 2), child(x, y));
      }
    }
    pyr.levels_.push_back(std::move(parent));
  }
  return pyr;
}

RenderRegion renderRegion(const MinMaxPyramid& pyramid, const StBox& box) {
  RenderRegion region;
  if (pyramid.levelCount() == 0 || pyramid.empty()) return region;
  const int leaf = std::min(kLeafLevel, pyramid.levelCount() - 1);
  region.tile_size = 1 << leaf;

  const Grid<StBox>& pixels = pyramid.level(0);
  auto descend = [&](auto&& self, int level, int x, int y) -> void {
    if (!footprintOverlaps(pyramid.level(level)(x, y), box)) return;
    if (level > leaf) {
      const Grid<StBox>& below = pyramid.level(level - 1);
      for (int cy = 2 * y; cy < std::min(2 * y + 2, below.height()); ++cy) {
        for (int cx = 2 * x; cx < std::min(2 * x + 2, below.width()); ++cx) {
          self(self, level - 1, cx, cy);
        }
      }
      return;
    }
    region.tiles.push_back({x, y});
    const int x1 = std::min((x + 1) * region.tile_size, pixels.width());
    const int y1 = std::min((y + 1) * region.tile_size, pixels.height());
    for (int py = y * region.tile_size; py < y1; ++py) {
      for (int px = x * region.tile_size; px < x1; ++px) {
        if (footprintOverlaps(pixels(px, py), box)) region.pixels.push_back({px, py});
      }
    }
  };
  descend(descend, pyramid.levelCount() - 1, 0, 0);

  std::sort(region.pixels.begin(), region.pixels.end(), [](const PixelIndex& a, const PixelIndex& b) {
    return std::tie(a.y, a.x) < std::tie(b.y, b.x);
  });
  return region;
}

RasterStatus rasterizeSTMap(const ProjectedTriangle& tri, const STMap& map,
                            const RasterOptions& options, const FragmentSink& sink,
                            const MinMaxPyramid* pyramid) {
  if (map.kind != MapKind::Distort) {
    throw ValidationError("STMap rasterization needs a distort map");
  }
  const auto& p = tri.position;
  if (!isFinite(p[0]) || !isFinite(p[1]) || !isFinite(p[2]) || !allFinite(tri.inv_depth)) {
    return RasterStatus::Degenerate;
  }
  const double area2 = doubleSignedArea(p[0], p[1], p[2]);
  if (!(std::abs(area2) >= kDegenerateEpsilon)) return RasterStatus::Degenerate;
  if (options.cull_back_faces && area2 < 0.0) return RasterStatus::Culled;

  const auto order = canonicalOrder(p);
  const auto pos = permute(p, order);
  const auto inv_depth = permute(tri.inv_depth, order);
  const auto attributes = permute(tri.attributes, order);

  EdgeMatrix chi;
  try {
    chi = barycentricMatrixPlanar(pos[0], pos[1], pos[2]);
  } catch (const DegenerateError&) {
    return RasterStatus::Degenerate;
  }

  const StBox box = triangleBox(tri);
  std::vector<PixelIndex> candidates;
  if (pyramid != nullptr) {
    candidates = renderRegion(*pyramid, box).pixels;
  } else {
    for (int y = 0; y < map.height(); ++y) {
      for (int x = 0; x < map.width(); ++x) {
        if (footprintOverlaps(pixelFootprint(map, x, y), box)) candidates.push_back({x, y});
      }
    }
  }
  if (candidates.empty()) return RasterStatus::Offscreen;

  parallelFor(0, static_cast<int>(candidates.size()), [&](int n) {
    const auto [x, y] = candidates[n];
    if (!map.valid(x, y)) return;
    const auto lambda = chi.apply(map.texels(x, y));

    double cov = 1.0;
    if (options.antialias) {
      const MapJacobian j = mapJacobian(map, x, y);
      for (int i = 0; i < 3; ++i) {
        const Vec3& r = chi.rows[i];
        cov *= pixStep({lambda[i], r.x * j.ds_dx + r.y * j.dt_dx, r.x * j.ds_dy + r.y * j.dt_dy},
                       options.variant);
      }
    } else {
      cov = (lambda[0] >= 0.0 && lambda[1] >= 0.0 && lambda[2] >= 0.0) ? 1.0 : 0.0;
    }
    cov *= map.mask(x, y);
    if (cov <= 0.0) return;

    const auto corrected = perspectiveCorrect({lambda}, inv_depth);
    if (!corrected) return;
    emit(order, attributes, x, y, cov, *corrected, sink);
  });
  return RasterStatus::Ok;
}

RasterStatus rasterizePerspectiveMap(const ViewTriangle& tri, const PerspectiveMap& map,
                                     const RasterOptions& options, const FragmentSink& sink) {
  const auto& p = tri.position;
  if (!isFinite(p[0]) || !isFinite(p[1]) || !isFinite(p[2])) return RasterStatus::Degenerate;

  const auto order = canonicalOrder(p);
  const auto pos = permute(p, order);
  const auto attributes = permute(tri.attributes, order);

  EdgeMatrix chi;
  std::array<double, 3> inv_distance{};
  try {
    chi = barycentricMatrixSpherical(pos[0], pos[1], pos[2]);
    for (int i = 0; i < 3; ++i) {
      const double d = length(pos[i]);
      if (!(d >= kDegenerateEpsilon)) throw DegenerateError("vertex at the eye");
      inv_distance[i] = 1.0 / d;
    }
  } catch (const DegenerateError&) {
    return RasterStatus::Degenerate;
  }
  if (options.cull_back_faces) {
    // Counter-clockwise as seen from the eye: (B−A)×(C−A) points away from it.
    if (dot(cross(p[1] - p[0], p[2] - p[0]), p[0]) < 0.0) return RasterStatus::Culled;
  }

  // With every vertex in front of the eye the triangle's gnomonic
  // projection bounds the candidates; otherwise every valid texel is one.
  bool planar_bound = true;
  for (const Vec3& v : pos) {
    if (!(v.z > 1e-6 * length(v))) planar_bound = false;
  }
  StBox qbox = kEmptyBox;
  if (planar_bound) {
    for (const Vec3& v : pos) qbox = unite(qbox, {v.x / v.z, v.y / v.z, v.x / v.z, v.y / v.z});
  }

  std::atomic<bool> any{false};
  parallelFor(0, map.height(), [&](int y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!map.valid(x, y)) continue;
      const Vec3 g = map.directions(x, y);
      const SphereJacobian j = mapJacobian(map, x, y);

      if (planar_bound) {
        if (!(g.z > 0.0)) continue;
        const double iz = 1.0 / g.z;
        const Vec2 q{g.x * iz, g.y * iz};
        const double dqx_dx = (j.ddx.x - q.x * j.ddx.z) * iz;
        const double dqx_dy = (j.ddy.x - q.x * j.ddy.z) * iz;
        const double dqy_dx = (j.ddx.y - q.y * j.ddx.z) * iz;
        const double dqy_dy = (j.ddy.y - q.y * j.ddy.z) * iz;
        const double hx = 0.5 * std::hypot(dqx_dx, dqx_dy);
        const double hy = 0.5 * std::hypot(dqy_dx, dqy_dy);
        if (!footprintOverlaps({q.x - hx, q.y - hy, q.x + hx, q.y + hy}, qbox)) continue;
      }

      const auto lambda = chi.apply(g);
      double cov = 1.0;
      if (options.antialias) {
        for (int i = 0; i < 3; ++i) {
          cov *= pixStep({lambda[i], dot(chi.rows[i], j.ddx), dot(chi.rows[i], j.ddy)},
                         options.variant);
        }
      } else {
        cov = (lambda[0] >= 0.0 && lambda[1] >= 0.0 && lambda[2] >= 0.0) ? 1.0 : 0.0;
      }
      cov *= map.mask(x, y);
      if (cov <= 0.0) continue;

      const auto corrected = perspectiveCorrect({lambda}, inv_distance);
      if (!corrected) continue;
      any = true;
      emit(order, attributes, x, y, cov, *corrected, sink);
    }
  });
  return any ? RasterStatus::Ok : RasterStatus::Offscreen;
}

}  // namespace curvi
