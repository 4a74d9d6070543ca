#include "curvi/maps.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "curvi/error.hpp"

namespace curvi {

MappingVector mappingVector(double aspect, AovType type) {
  switch (type) {
    case AovType::Diagonal: {
      const double n = std::hypot(aspect, 1.0);
      return {aspect / n, 1.0 / n};
    }
    case AovType::Horizontal:
      return {1.0, 1.0 / aspect};
    case AovType::Horizontal4x3:
      return {0.75 * aspect, 0.75};
    case AovType::Vertical:
      return {aspect, 1.0};
  }
  return {1.0, 1.0 / aspect};
}

std::string_view aovSymbol(AovType type) {
  switch (type) {
    case AovType::Horizontal:
      return "h";
    case AovType::Vertical:
      return "v";
    case AovType::Diagonal:
      return "d";
    case AovType::Horizontal4x3:
      return "4x3h";
  }
  return "h";
}

std::string formatNumber(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::optional<double> parseNumber(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    return std::nullopt;
  }
  return v;
}

FieldOfView parseFieldOfView(std::string_view text) {
  // Longest symbol first so "4x3h" is not read as something shorter.
  for (AovType t : {AovType::Horizontal4x3, AovType::Horizontal, AovType::Vertical,
                    AovType::Diagonal}) {
    const std::string_view sym = aovSymbol(t);
    if (!text.starts_with(sym)) continue;
    const auto deg = parseNumber(text.substr(sym.size()));
    if (!deg) {
      throw ParseError("bad angle of view '" + std::string(text) + "'", sym.size());
    }
    return {t, *deg};
  }
  throw ParseError("angle of view must start with h, v, d or 4x3h: '" + std::string(text) + "'",
                   0);
}

std::string formatFieldOfView(const FieldOfView& fov) {
  return std::string(aovSymbol(fov.type)) + formatNumber(fov.degrees);
}

void requireEvenSize(int width, int height, const char* what) {
  if (width <= 0 || height <= 0 || width % 2 != 0 || height % 2 != 0) {
    throw ValidationError(std::string(what) +
                          ": resolution must be an even number in both dimensions, got " +
                          std::to_string(width) + "x" + std::to_string(height));
  }
}

STMap::STMap(int width, int height, MapKind k)
    : texels((requireEvenSize(width, height, "STMap"), width), height), mask(width, height, 1.0),
      kind(k) {}

Vec2 STMap::sample(const Vec2& st) const {
  const double fx = std::clamp(st.x * width() - 0.5, 0.0, width() - 1.0);
  const double fy = std::clamp(st.y * height() - 0.5, 0.0, height() - 1.0);
  const int x0 = std::min(static_cast<int>(fx), width() - 2);
  const int y0 = std::min(static_cast<int>(fy), height() - 2);
  const double ax = fx - x0;
  const double ay = fy - y0;
  const Vec2 bottom = texels(x0, y0) * (1.0 - ax) + texels(x0 + 1, y0) * ax;
  const Vec2 top = texels(x0, y0 + 1) * (1.0 - ax) + texels(x0 + 1, y0 + 1) * ax;
  return bottom * (1.0 - ay) + top * ay;
}

PerspectiveMap::PerspectiveMap(int width, int height)
    : directions((requireEvenSize(width, height, "PerspectiveMap"), width), height),
      mask(width, height, 1.0) {}

}  // namespace curvi
