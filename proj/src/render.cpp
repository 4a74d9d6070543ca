#include "curvi/render.hpp"

#include <cmath>

#include "curvi/error.hpp"

namespace curvi {

namespace {

CompositeOptions compositeOptions(const RenderSettings& s) {
  CompositeOptions c;
  c.mode = s.raster.antialias ? MergeMode::FrontToBack : MergeMode::DepthTest;
  c.alpha_to_coverage = s.alpha_to_coverage;
  return c;
}

void count(RenderStats* stats, RasterStatus status) {
  if (stats == nullptr) return;
  switch (status) {
    case RasterStatus::Ok:
      ++stats->drawn;
      break;
    case RasterStatus::Degenerate:
      ++stats->degenerate;
      break;
    case RasterStatus::Offscreen:
      ++stats->offscreen;
      break;
    case RasterStatus::Culled:
      ++stats->culled;
      break;
  }
}

// Draws the scene nearest first; `draw` rasterizes one triangle into the
// given sink.
template <typename Draw>
void drawScene(const Scene& scene, Framebuffer& fb, const RenderSettings& settings,
               RenderStats* stats, Draw&& draw) {
  const CompositeOptions comp = compositeOptions(settings);
  const FragmentSink sink = [&](const Fragment& f) { mergeFragment(fb, f, comp); };
  const auto order = sortFrontToBack(scene.triangles);
  if (stats != nullptr) stats->submitted += static_cast<int>(scene.triangles.size());
  for (std::size_t i : order.order) draw(scene.triangles[i], sink);
}

void finish(Framebuffer& fb, const Rgba& background, const Grid<double>* mask,
            const Grid<double>* vignette) {
  fillBackground(fb, background);
  for (int y = 0; y < fb.height(); ++y) {
    for (int x = 0; x < fb.width(); ++x) {
      if (mask != nullptr && !((*mask)(x, y) > 0.0)) {
        fb.coverage(x, y) = 0.0;
        fb.data(x, y) = Rgba{};
        continue;
      }
      if (vignette != nullptr) {
        const double v = (*vignette)(x, y);
        Rgba& d = fb.data(x, y);
        d.r *= v;
        d.g *= v;
        d.b *= v;
      }
    }
  }
}

}  // namespace

Vec2 projectToFrame(const Vec3& p, const FieldOfView& fov, double aspect) {
  const MappingVector u = mappingVector(aspect, fov.type);
  const double t = std::tan(fov.radians() / 2.0);
  return {p.x / p.z / (2.0 * u.s * t) + 0.5, p.y / p.z / (2.0 * u.t * t) + 0.5};
}

std::optional<ProjectedTriangle> projectTriangle(const ViewTriangle& tri, const FieldOfView& fov,
                                                 double aspect, double scale_x, double scale_y) {
  ProjectedTriangle out;
  for (int i = 0; i < 3; ++i) {
    const Vec3& p = tri.position[i];
    if (!(p.z > 0.0)) return std::nullopt;
    const Vec2 f = projectToFrame(p, fov, aspect);
    out.position[i] = {f.x * scale_x, f.y * scale_y};
    out.inv_depth[i] = 1.0 / p.z;
  }
  out.attributes = tri.attributes;
  return out;
}

Framebuffer renderRectilinear(const Scene& scene, int width, int height,
                              const RenderSettings& settings, RenderStats* stats) {
  if (!(settings.fov.degrees > 0.0 && settings.fov.degrees < 180.0)) {
    throw ValidationError("rectilinear angle of view must be below 180 degrees");
  }
  Framebuffer fb(width, height);
  const double aspect = static_cast<double>(width) / height;
  drawScene(scene, fb, settings, stats, [&](const ViewTriangle& t, const FragmentSink& sink) {
    const auto proj = projectTriangle(t, settings.fov, aspect, width, height);
    if (!proj) {
      if (stats != nullptr) ++stats->behind_eye;
      return;
    }
    count(stats, rasterizeRectilinear(*proj, {width, height}, settings.raster, sink));
  });
  finish(fb, scene.background, nullptr, nullptr);
  return fb;
}

Framebuffer renderSTMap(const Scene& scene, const STMap& map, const RenderSettings& settings,
                        RenderStats* stats) {
  if (!(settings.fov.degrees > 0.0 && settings.fov.degrees < 180.0)) {
    throw ValidationError("STMap source angle of view must be below 180 degrees");
  }
  Framebuffer fb(map.width(), map.height());
  const MinMaxPyramid pyramid = buildMinMaxPyramid(map);
  const double aspect = map.aspect();
  drawScene(scene, fb, settings, stats, [&](const ViewTriangle& t, const FragmentSink& sink) {
    const auto proj = projectTriangle(t, settings.fov, aspect);
    if (!proj) {
      if (stats != nullptr) ++stats->behind_eye;
      return;
    }
    count(stats, rasterizeSTMap(*proj, map, settings.raster, sink, &pyramid));
  });
  finish(fb, scene.background, &map.mask,
         settings.apply_vignette && map.hasVignette() ? &map.vignette : nullptr);
  return fb;
}

Framebuffer renderPerspectiveMap(const Scene& scene, const PerspectiveMap& map,
                                 const RenderSettings& settings, RenderStats* stats) {
  Framebuffer fb(map.width(), map.height());
  drawScene(scene, fb, settings, stats, [&](const ViewTriangle& t, const FragmentSink& sink) {
    count(stats, rasterizePerspectiveMap(t, map, settings.raster, sink));
  });
  finish(fb, scene.background, &map.mask,
         settings.apply_vignette && map.hasVignette() ? &map.vignette : nullptr);
  return fb;
}

}  // namespace curvi
