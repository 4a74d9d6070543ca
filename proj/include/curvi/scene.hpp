#pragma once

// Text scene format.
//
//   # comment
//   background r g b [a]
//   v x y z  r g b a  u v
//
// Positions are in view space (eye at the origin, +z forward, +y up).
// Every three consecutive `v` lines form one triangle. Colors are linear.

#include <filesystem>
#include <istream>
#include <vector>

#include "curvi/primitive.hpp"

namespace curvi {

struct Scene {
  std::vector<ViewTriangle> triangles;
  Rgba background{0.0, 0.0, 0.0, 1.0};
};

// Throws ParseError with the 1-based line number as position.
Scene parseScene(std::istream& in);
Scene loadScene(const std::filesystem::path& path);

}  // namespace curvi
