#include "curvi/geometry.hpp"

#include <cmath>

#include "curvi/error.hpp"

namespace curvi {

double doubleSignedArea(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

EdgeMatrix edgeMatrix(const Vec2& a, const Vec2& b, const Vec2& c) {
  if (std::abs(doubleSignedArea(a, b, c)) < kDegenerateEpsilon) {
    throw DegenerateError("edgeMatrix: zero-area triangle");
  }
  const Vec3 ha = homogeneous(a);
  const Vec3 hb = homogeneous(b);
  const Vec3 hc = homogeneous(c);
  return EdgeMatrix{{cross(hb, hc), cross(hc, ha), cross(ha, hb)}, false};
}

EdgeMatrix scaleEdgeMatrix(const EdgeMatrix& raw, const std::array<double, 3>& slopes) {
  EdgeMatrix out{raw.rows, true};
  for (int i = 0; i < 3; ++i) {
    if (!(slopes[i] >= kDegenerateEpsilon)) {
      throw DegenerateError("scaleEdgeMatrix: degenerate edge");
    }
    const Vec3& r = raw.rows[i];
    out.rows[i] = {r.x / slopes[i], r.y / slopes[i], r.z / slopes[i] + 0.5};
  }
  return out;
}

EdgeMatrix normalizeEdgeMatrix(const EdgeMatrix& raw) {
  std::array<double, 3> lengths{};
  for (int i = 0; i < 3; ++i) {
    lengths[i] = std::hypot(raw.rows[i].x, raw.rows[i].y);
  }
  return scaleEdgeMatrix(raw, lengths);
}

namespace {

EdgeMatrix divideRows(const std::array<Vec3, 3>& numerators,
                      const std::array<double, 3>& denominators, const char* what) {
  EdgeMatrix out;
  for (int i = 0; i < 3; ++i) {
    if (!(std::abs(denominators[i]) >= kDegenerateEpsilon)) {
      throw DegenerateError(what);
    }
    out.rows[i] = numerators[i] / denominators[i];
  }
  return out;
}

}  // namespace

EdgeMatrix barycentricMatrixPlanar(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec3 ha = homogeneous(a);
  const Vec3 hb = homogeneous(b);
  const Vec3 hc = homogeneous(c);
  const Vec3 bc = cross(hb, hc);
  const Vec3 ca = cross(hc, ha);
  const Vec3 ab = cross(ha, hb);
  return divideRows({bc, ca, ab}, {dot(ha, bc), dot(hb, ca), dot(hc, ab)},
                    "barycentricMatrixPlanar: degenerate triangle");
}

EdgeMatrix barycentricMatrixSpherical(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double la = length(a);
  const double lb = length(b);
  const double lc = length(c);
  if (la < kDegenerateEpsilon || lb < kDegenerateEpsilon || lc < kDegenerateEpsilon) {
    throw DegenerateError("barycentricMatrixSpherical: vertex at the eye");
  }
  const Vec3 bc = cross(b, c);
  const Vec3 ca = cross(c, a);
  const Vec3 ab = cross(a, b);
  return divideRows({bc, ca, ab}, {dot(a, bc) / la, dot(b, ca) / lb, dot(c, ab) / lc},
                    "barycentricMatrixSpherical: triangle plane passes through the eye");
}

EdgeWeights edgeWeights(const EdgeMatrix& chi, const Vec2& a, const Vec2& b, const Vec2& c) {
  const std::array<Vec3, 3> vertices{homogeneous(a), homogeneous(b), homogeneous(c)};
  const double offset = chi.normalized ? 0.5 : 0.0;
  EdgeWeights w;
  for (int i = 0; i < 3; ++i) {
    const double d = dot(vertices[i], chi.rows[i]) - offset;
    if (!(std::abs(d) >= kDegenerateEpsilon)) {
      throw DegenerateError("edgeWeights: degenerate triangle");
    }
    w.values[i] = 1.0 / d;
  }
  return w;
}

double coverage(const HalfSpaceTriple& xi) {
  return xi.values[0] * xi.values[1] * xi.values[2];
}

std::optional<PerspectiveSample> perspectiveCorrect(const BarycentricTriple& lambda,
                                                    const std::array<double, 3>& inv_w) {
  const double denom = lambda.values[0] * inv_w[0] + lambda.values[1] * inv_w[1] +
                       lambda.values[2] * inv_w[2];
  if (!(denom > 0.0)) {
    return std::nullopt;
  }
  PerspectiveSample s;
  s.w = 1.0 / denom;
  s.corrected.corrected = true;
  for (int i = 0; i < 3; ++i) {
    s.corrected.values[i] = s.w * lambda.values[i] * inv_w[i];
  }
  return s;
}

}  // namespace curvi
