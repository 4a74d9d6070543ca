#pragma once

// Rasterization lookup maps.
//
// Texel (i, j) samples the frame at ((i+½)/W, (j+½)/H); row 0 is the bottom
// of the frame (t grows upwards). Files store rows top-down and image-io
// flips them on the way in and out.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curvi/vec.hpp"

namespace curvi {

enum class AovType {
  Horizontal,
  Vertical,
  Diagonal,
  Horizontal4x3,
};

// Angle of view and the frame axis it is measured along.
struct FieldOfView {
  AovType type = AovType::Horizontal;
  double degrees = 90.0;

  double radians() const { return curvi::radians(degrees); }
};

// Symbol of an angle-of-view type: h, v, d or 4x3h.
std::string_view aovSymbol(AovType type);
// "h90" -> {Horizontal, 90}. Throws ParseError.
FieldOfView parseFieldOfView(std::string_view text);
// {Horizontal, 90} -> "h90".
std::string formatFieldOfView(const FieldOfView& fov);

// Shortest decimal text that reads back to the same double.
std::string formatNumber(double v);
// Whole-string decimal parse; empty on any leftover character.
std::optional<double> parseNumber(std::string_view text);

struct MappingVector {
  double s = 1.0;
  double t = 1.0;
};

// Scales the normalized frame so the AOV axis spans [-1, 1].
MappingVector mappingVector(double aspect, AovType type);

enum class MapKind {
  Distort,    // output pixel -> source st
  Undistort,  // source st -> output pixel
};

// Generator parameters recorded alongside a map ("aov" -> "h90", "k" -> "1").
using MapMetadata = std::map<std::string, std::string>;

template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, const T& fill = T{})
      : width_(width), height_(height),
        cells_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }

  T& operator()(int x, int y) { return cells_[index(x, y)]; }
  const T& operator()(int x, int y) const { return cells_[index(x, y)]; }

  std::vector<T>& cells() { return cells_; }
  const std::vector<T>& cells() const { return cells_; }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> cells_;
};

template <typename T>
struct Differences {
  T ddx{};
  T ddy{};
};

// Per-pixel derivative of a grid by central differences. A neighbor that is
// off the grid or fails `valid` turns that axis into a one-sided
// difference; with no valid neighbor on an axis its derivative is zero.
template <typename T, typename ValidFn>
Differences<T> centralDifferences(const Grid<T>& g, ValidFn valid, int x, int y) {
  auto usable = [&](int i, int j) {
    return i >= 0 && j >= 0 && i < g.width() && j < g.height() && valid(i, j);
  };
  auto axis = [&](int dx, int dy) -> T {
    const bool lo = usable(x - dx, y - dy);
    const bool hi = usable(x + dx, y + dy);
    if (lo && hi) return (g(x + dx, y + dy) - g(x - dx, y - dy)) / 2.0;
    if (hi) return g(x + dx, y + dy) - g(x, y);
    if (lo) return g(x, y) - g(x - dx, y - dy);
    return T{};
  };
  return {axis(1, 0), axis(0, 1)};
}

// Throws ValidationError unless width and height are even and positive.
void requireEvenSize(int width, int height, const char* what);

// Frame coordinate of a texel center.
inline Vec2 texelCenter(int x, int y, int width, int height) {
  return {(x + 0.5) / width, (y + 0.5) / height};
}

struct STMap {
  STMap() = default;
  STMap(int width, int height, MapKind kind = MapKind::Distort);

  int width() const { return texels.width(); }
  int height() const { return texels.height(); }
  double aspect() const { return static_cast<double>(width()) / height(); }
  bool valid(int x, int y) const { return mask(x, y) > 0.0; }

  // Bilinear lookup at a frame coordinate, clamped at the borders. Masked
  // texels take part like any other; check the mask separately.
  Vec2 sample(const Vec2& st) const;

  bool hasVignette() const { return vignette.width() > 0; }

  Grid<Vec2> texels;
  // 1 where the mapping is defined, 0 outside; fractional on soft borders.
  Grid<double> mask;
  // Linear natural-vignetting factor; empty when not generated.
  Grid<double> vignette;
  MapKind kind = MapKind::Distort;
  MapMetadata metadata;
};

struct PerspectiveMap {
  PerspectiveMap() = default;
  PerspectiveMap(int width, int height);

  int width() const { return directions.width(); }
  int height() const { return directions.height(); }
  double aspect() const { return static_cast<double>(width()) / height(); }
  bool valid(int x, int y) const { return mask(x, y) > 0.0; }
  bool hasVignette() const { return vignette.width() > 0; }

  // Unit view-sphere directions.
  Grid<Vec3> directions;
  Grid<double> mask;
  // Linear natural-vignetting factor; empty when not generated.
  Grid<double> vignette;
  MapMetadata metadata;
};

}  // namespace curvi
