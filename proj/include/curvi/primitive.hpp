#pragma once

#include <array>
#include <functional>

#include "curvi/geometry.hpp"
#include "curvi/vec.hpp"

namespace curvi {

struct VertexAttributes {
  Rgba color{1.0, 1.0, 1.0, 1.0};
  Vec2 uv;
};

// Triangle after perspective division, in pixel or STMap space.
struct ProjectedTriangle {
  std::array<Vec2, 3> position{};
  // 1/z of each vertex; all ones for flat 2D work.
  std::array<double, 3> inv_depth{1.0, 1.0, 1.0};
  std::array<VertexAttributes, 3> attributes{};
};

// Triangle in view space: eye at the origin, +z forward, +y up.
struct ViewTriangle {
  std::array<Vec3, 3> position{};
  std::array<VertexAttributes, 3> attributes{};
};

struct Fragment {
  int x = 0;
  int y = 0;
  double coverage = 0.0;
  // Depth for the planar paths, eye distance for the Perspective Map path.
  double depth = 0.0;
  BarycentricTriple barycentric;  // λ′
  Rgba color;
  Vec2 uv;
};

// Receives fragments from a rasterizer. Rasterizers may call it from several
// threads at once, but never twice for the same pixel of one primitive.
using FragmentSink = std::function<void(const Fragment&)>;

// Fills color and uv of `f` from λ′.
void interpolateAttributes(const std::array<VertexAttributes, 3>& attributes, Fragment& f);

}  // namespace curvi
