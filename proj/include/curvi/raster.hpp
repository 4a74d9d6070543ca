#pragma once

// Rectilinear rasterization with analytic edge anti-aliasing.
//
// Pixel (i, j) covers [i, i+1]×[j, j+1] and is sampled at its center
// (i+½, j+½). Vertex positions are floating-point pixel coordinates.

#include <optional>

#include "curvi/primitive.hpp"
#include "curvi/vec.hpp"

namespace curvi {

// Edge-slope estimate used by the pixel step.
enum class StepVariant {
  Length,       // I:   |∇Γ|
  FWidth,       // II:  |∂Γ/∂x| + |∂Γ/∂y|
  TwiceLength,  // III: 2|∇Γ|
};

struct GradientSample {
  double value = 0.0;
  double ddx = 0.0;
  double ddy = 0.0;
};

struct PixelExtent {
  int width = 0;
  int height = 0;
};

// Inclusive pixel-index box.
struct BoundingBox {
  int min_x = 0;
  int min_y = 0;
  int max_x = -1;
  int max_y = -1;
};

struct RasterOptions {
  StepVariant variant = StepVariant::Length;
  bool antialias = true;
  // Drops clockwise triangles. Off by default: both windings are drawn.
  bool cull_back_faces = false;
};

enum class RasterStatus {
  Ok,
  Degenerate,
  Offscreen,
  Culled,
};

double edgeSlope(double ddx, double ddy, StepVariant variant);

// clamp(Γ/slope + ½, 0, 1); a hard step when the slope collapses.
double pixStep(const GradientSample& g, StepVariant variant = StepVariant::Length);

// ⌈min − ½⌉ .. ⌊max + ½⌋ per axis, clamped to [0, extent − 1]. Coordinates
// are in pixel-index units where the center of pixel i sits at i. Empty
// when the triangle misses the extent.
std::optional<BoundingBox> boundingBoxExpanded(const Vec2& a, const Vec2& b, const Vec2& c,
                                               PixelExtent extent);

// Emits one fragment per pixel with nonzero coverage. The sink may be called
// concurrently for distinct pixels.
RasterStatus rasterizeRectilinear(const ProjectedTriangle& tri, PixelExtent extent,
                                  const RasterOptions& options, const FragmentSink& sink);

}  // namespace curvi
