#pragma once

// Rasterization through lookup maps.
//
// The target framebuffer has the map's resolution: pixel (x, y) reads texel
// (x, y). Screen-space derivatives come from central differences of the
// map texels, chained through the linear barycentric rows.

#include <vector>

#include "curvi/maps.hpp"
#include "curvi/primitive.hpp"
#include "curvi/raster.hpp"

namespace curvi {

// ∂(s, t)/∂(x, y) per pixel.
struct MapJacobian {
  double ds_dx = 0.0;
  double ds_dy = 0.0;
  double dt_dx = 0.0;
  double dt_dy = 0.0;
};

// ∂Ĝ/∂x and ∂Ĝ/∂y per pixel.
struct SphereJacobian {
  Vec3 ddx;
  Vec3 ddy;
};

MapJacobian mapJacobian(const STMap& map, int x, int y);
SphereJacobian mapJacobian(const PerspectiveMap& map, int x, int y);

// Axis-aligned box in STMap space.
struct StBox {
  double min_s = 0.0;
  double min_t = 0.0;
  double max_s = 0.0;
  double max_t = 0.0;
};

// Un-expanded bounding box of the triangle's STMap-space vertices.
StBox triangleBox(const ProjectedTriangle& tri);

// (s − ½|∇s|, t − ½|∇t|, s + ½|∇s|, t + ½|∇t|) of one pixel; an empty box
// (min > max) for masked texels.
StBox pixelFootprint(const STMap& map, int x, int y);

// The four-way conjunction: footprint strictly inside the box on the upper
// side, at or above it on the lower side.
bool testBB(const StBox& footprint, const StBox& box);

// Footprint and box intersect. Every pixel passing testBB passes this.
bool footprintOverlaps(const StBox& footprint, const StBox& box);

struct PixelIndex {
  int x = 0;
  int y = 0;
  bool operator==(const PixelIndex&) const = default;
};

// Levels of (min_s, min_t, max_s, max_t) footprints; level 0 is per pixel,
// each parent bounds its 2×2 children.
class MinMaxPyramid {
 public:
  int levelCount() const { return static_cast<int>(levels_.size()); }
  const Grid<StBox>& level(int i) const { return levels_[i]; }
  // True when every texel of the map was masked.
  bool empty() const { return empty_; }

 private:
  friend MinMaxPyramid buildMinMaxPyramid(const STMap& map);
  std::vector<Grid<StBox>> levels_;
  bool empty_ = true;
};

MinMaxPyramid buildMinMaxPyramid(const STMap& map);

// Pixels that may intersect `box`: pyramid nodes overlapping the box are
// descended down to 8×8 leaf tiles whose pixels are then filtered by
// footprintOverlaps. Contains every pixel whose footprint overlaps the box.
struct RenderRegion {
  std::vector<PixelIndex> tiles;   // leaf tile indices at `tile_size`
  std::vector<PixelIndex> pixels;  // row-major
  int tile_size = 8;
};

RenderRegion renderRegion(const MinMaxPyramid& pyramid, const StBox& box);

// STMap rasterization. `tri` is in STMap space ([0,1]², after perspective
// division) with 1/z in inv_depth. Both windings are drawn identically.
// When `pyramid` is given it must have been built from `map`; it only
// speeds up candidate selection.
RasterStatus rasterizeSTMap(const ProjectedTriangle& tri, const STMap& map,
                            const RasterOptions& options, const FragmentSink& sink,
                            const MinMaxPyramid* pyramid = nullptr);

// Perspective Map rasterization of a view-space triangle. Fragment depth is
// the eye distance. Both windings are drawn identically.
RasterStatus rasterizePerspectiveMap(const ViewTriangle& tri, const PerspectiveMap& map,
                                     const RasterOptions& options, const FragmentSink& sink);

}  // namespace curvi
