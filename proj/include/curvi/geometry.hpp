#pragma once

// Triangle edge-function and barycentric math shared by every rasterizer.
//
// An edge matrix holds one edge function per row. Row i belongs to the edge
// opposite vertex i, so evaluating it at a homogeneous point [x y 1] gives
// zero on that edge and a positive value towards vertex i for a
// counter-clockwise triangle.

#include <array>
#include <optional>

#include "curvi/vec.hpp"

namespace curvi {

// Guard used for every denominator and area test.
inline constexpr double kDegenerateEpsilon = 1e-12;

struct EdgeMatrix {
  std::array<Vec3, 3> rows{};
  // True when rows are 2D-normalized and carry the +½ offset.
  bool normalized = false;

  // Row-wise dot products with `p`.
  std::array<double, 3> apply(const Vec3& p) const {
    return {dot(rows[0], p), dot(rows[1], p), dot(rows[2], p)};
  }
  std::array<double, 3> apply(const Vec2& p) const { return apply(homogeneous(p)); }
};

struct HalfSpaceTriple {
  std::array<double, 3> values{};
};

struct BarycentricTriple {
  std::array<double, 3> values{};
  // λ′ (perspective-corrected) rather than linear/spherical λ.
  bool corrected = false;

  double sum() const { return values[0] + values[1] + values[2]; }
};

struct EdgeWeights {
  std::array<double, 3> values{};
};

struct PerspectiveSample {
  double w = 0.0;  // interpolated depth or distance
  BarycentricTriple corrected;
};

// Twice the signed area; positive for counter-clockwise A, B, C.
double doubleSignedArea(const Vec2& a, const Vec2& b, const Vec2& c);

// Raw rasterization matrix: rows are B×C, C×A, A×B of the homogeneous
// vertices. Throws DegenerateError for collinear vertices.
EdgeMatrix edgeMatrix(const Vec2& a, const Vec2& b, const Vec2& c);

// Divides row i by slopes[i] and adds ½ to its offset, so that the row
// crosses ½ on the edge. Throws DegenerateError when a slope is below
// kDegenerateEpsilon.
EdgeMatrix scaleEdgeMatrix(const EdgeMatrix& raw, const std::array<double, 3>& slopes);

// χ′: every row divided by the length of its (x, y) part, plus ½.
EdgeMatrix normalizeEdgeMatrix(const EdgeMatrix& raw);

// Rows (B×C)/(A·(B×C)), ... of the homogeneous vertices. λ = M·[x y 1] is
// the linear barycentric coordinate for either winding.
EdgeMatrix barycentricMatrixPlanar(const Vec2& a, const Vec2& b, const Vec2& c);

// Rows (B×C)/(Â·(B×C)), ... of view-space vertices; applied to a unit
// direction it yields the spherical barycentric triple.
EdgeMatrix barycentricMatrixSpherical(const Vec3& a, const Vec3& b, const Vec3& c);

// ωᵢ = 1 / (Vᵢ · rowᵢ). For a normalized matrix the ½ offset is removed
// first, so λᵢ = (f·χ′ᵢ − ½)·ωᵢ.
EdgeWeights edgeWeights(const EdgeMatrix& chi, const Vec2& a, const Vec2& b, const Vec2& c);

// Λ = Ξ₁·Ξ₂·Ξ₃.
double coverage(const HalfSpaceTriple& xi);

// w = (λ·invW)⁻¹ and λ′ᵢ = w·λᵢ·invWᵢ. Empty when λ·invW ≤ 0, i.e. the
// sample lies behind the eye or on a degenerate plane.
std::optional<PerspectiveSample> perspectiveCorrect(const BarycentricTriple& lambda,
                                                    const std::array<double, 3>& inv_w);

}  // namespace curvi
