#pragma once

// Generators for rasterization maps: Universal Perspective STMaps and
// Perspective Maps with natural vignetting, lens-distortion STMaps,
// Perspective Map to STMap conversion and STMap inversion.

#include <optional>
#include <string>
#include <vector>

#include "curvi/maps.hpp"
#include "curvi/vec.hpp"

namespace curvi {

// Universal Perspective model.
//   k: perspective type, 1 rectilinear, ½ stereographic, 0 equidistant,
//      -½ equisolid, -1 orthographic.
//   l: 1 spherical, 0 cylindrical; values above 1 pre-compensate curved
//      displays.
//   s: anamorphic correction of the non-spherical part.
struct UniversalParams {
  FieldOfView fov{AovType::Horizontal, 90.0};
  double k = 1.0;
  double l = 1.0;
  double s = 0.98;

  // Throws ValidationError for Ω ≤ 0 or above 360°, k outside [-1, 1],
  // s outside [0.8, 1] or l < 0.
  void validate() const;
  // Accepted-but-unusual settings (l > 1).
  std::vector<std::string> warnings() const;
};

struct PolarSample {
  Vec2 f_xy;
  double radius = 0.0;       // R = √(x² + l·y²)
  double theta = 0.0;        // incident angle
  double theta_prime = 0.0;  // θ·max(|k|, ½)
};

struct UniversalSample {
  PolarSample polar;
  // tanθ/R·(x, y·((1−l)/s + l)); meaningful only while θ < 90°.
  Vec2 view;
  // False when θ is undefined (arcsin argument out of range).
  bool valid = true;
};

// (2u_s·s − u_s, 2u_t·t − u_t).
Vec2 universalViewCoord(const Vec2& f_st, const MappingVector& u);

UniversalSample universalProject(const Vec2& f_xy, const UniversalParams& p);

// Distorted STMap coordinate of one frame point; empty where the map is
// undefined (θ outside the domain or at or beyond 90°).
std::optional<Vec2> universalSTCoord(const Vec2& f_st, const UniversalParams& p, double aspect);

// View-sphere direction of one frame point; empty where θ is undefined or
// beyond 180°.
std::optional<Vec3> universalDirection(const Vec2& f_st, const UniversalParams& p, double aspect);

// Distort STMap. Requires Ω < 180°; use universalPerspectiveMap for wider
// views. `with_vignette` fills the linear vignette channel.
STMap universalSTMap(const UniversalParams& p, int width, int height, bool with_vignette = false);

PerspectiveMap universalPerspectiveMap(const UniversalParams& p, int width, int height,
                                       bool with_vignette = true);

struct VignetteSample {
  double spherical = 1.0;    // v_s
  double cylindrical = 1.0;  // v_c
  double value = 1.0;        // v = v_s·v_c, linear
  double encoded = 1.0;      // v^(1/γ)
};

VignetteSample vignette(const PolarSample& sample, double k, double gamma = 2.2);

// w^(1/γ).
double gammaEncode(double w, double gamma);

// Lens distortion with angle-of-view normalization.
struct LensParams {
  std::vector<double> radial{0.0, 0.0};  // k₁..kₙ
  Vec2 prism;                            // p₁, p₂
  Vec2 decentering;                      // q₁, q₂
  Vec2 cardinal;                         // c₁, c₂
  AovType aov = AovType::Diagonal;

  // Coefficients outside the suggested ranges (|k| ≤ 0.4, |p| ≤ 0.2,
  // |q| ≤ 0.1, |c| ≤ 0.2). Never rejected.
  std::vector<std::string> warnings() const;
};

// Distorted STMap coordinate of one frame point; empty where the radial
// denominator vanishes.
std::optional<Vec2> lensDistortCoord(const Vec2& f_st, const LensParams& p, double aspect);

STMap lensDistortSTMap(const LensParams& p, int width, int height);

// Planar projection of a Perspective Map into an STMap with the given Ω
// (below 180°). The mask is the anti-aliased near-plane test on Ĝ_z,
// multiplied by the input mask.
STMap perspectiveMapToSTMap(const PerspectiveMap& pm, const FieldOfView& fov,
                            double z_near = 0.01);

// Undistort map of a distort map: forward scatter of every source texel
// followed by Newton refinement on bilinear samples (≤ 8 iterations,
// 1e-5 tolerance). Target texels that cannot be reached, or that only
// converge outside the frame, are masked; their value is the nearest
// scatter hit when one exists.
STMap invertSTMap(const STMap& distort);

// Panorama of `screens` rectilinear panels side by side, each with vertical
// angle of view `vertical_fov_deg`, yawed so that neighboring panels meet.
PerspectiveMap multiScreenPerspectiveMap(int screens, double vertical_fov_deg, int width,
                                         int height);

}  // namespace curvi
