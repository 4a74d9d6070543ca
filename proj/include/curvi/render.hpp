#pragma once

// Scene rendering: projection, front-to-back ordering, rasterization through
// one of the three paths, compositing and background/vignette finishing.

#include <optional>

#include "curvi/compositor.hpp"
#include "curvi/map_raster.hpp"
#include "curvi/maps.hpp"
#include "curvi/raster.hpp"
#include "curvi/scene.hpp"

namespace curvi {

struct RenderSettings {
  // Rectilinear camera used by the rectilinear and STMap paths. The STMap
  // path should use the angle of view the map was generated for.
  FieldOfView fov{AovType::Horizontal, 90.0};
  RasterOptions raster;
  // Scale shaded output by the map's vignette channel when it has one.
  bool apply_vignette = true;
  bool alpha_to_coverage = false;
};

struct RenderStats {
  int submitted = 0;
  int drawn = 0;
  int degenerate = 0;
  int offscreen = 0;
  int culled = 0;
  // Planar paths skip triangles with a vertex at or behind the eye plane.
  int behind_eye = 0;
};

// Frame coordinate ([0, 1]² across the view) of a view-space point seen by
// a rectilinear camera. Requires p.z > 0.
Vec2 projectToFrame(const Vec3& p, const FieldOfView& fov, double aspect);

// Projects to the frame scaled by (scale_x, scale_y), with 1/z as inverse
// depth. Empty when a vertex has z ≤ 0.
std::optional<ProjectedTriangle> projectTriangle(const ViewTriangle& tri, const FieldOfView& fov,
                                                 double aspect, double scale_x = 1.0,
                                                 double scale_y = 1.0);

Framebuffer renderRectilinear(const Scene& scene, int width, int height,
                              const RenderSettings& settings, RenderStats* stats = nullptr);
Framebuffer renderSTMap(const Scene& scene, const STMap& map, const RenderSettings& settings,
                        RenderStats* stats = nullptr);
Framebuffer renderPerspectiveMap(const Scene& scene, const PerspectiveMap& map,
                                 const RenderSettings& settings, RenderStats* stats = nullptr);

}  // namespace curvi
