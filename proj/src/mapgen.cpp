#include "curvi/mapgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvi/error.hpp"
#include "curvi/parallel.hpp"
#include "curvi/raster.hpp"

namespace curvi {

namespace {

// Below this radius tanθ/R and sinθ/R are replaced by their limit at R = 0.
constexpr double kCenterEpsilon = 1e-8;

MapMetadata universalMetadata(const UniversalParams& p) {
  return {{"model", "universal"},
          {"aov", formatFieldOfView(p.fov)},
          {"k", formatNumber(p.k)},
          {"l", formatNumber(p.l)},
          {"s", formatNumber(p.s)}};
}

// dθ/dR at the center, the common limit of tanθ/R and sinθ/R.
double centerSlope(const UniversalParams& p) {
  const double half = p.fov.radians() / 2.0;
  if (p.k > 0.0) return std::tan(p.k * half) / p.k;
  if (p.k < 0.0) return std::sin(p.k * half) / p.k;
  return half;
}

double anamorphicScale(const UniversalParams& p) { return (1.0 - p.l) / p.s + p.l; }

}  // namespace

void UniversalParams::validate() const {
  if (!(fov.degrees > 0.0 && fov.degrees <= 360.0)) {
    throw ValidationError("angle of view must be in (0, 360] degrees");
  }
  if (!(k >= -1.0 && k <= 1.0)) throw ValidationError("k must be in [-1, 1]");
  if (!(l >= 0.0) || !std::isfinite(l)) throw ValidationError("l must be non-negative");
  if (!(s >= 0.8 && s <= 1.0)) throw ValidationError("s must be in [0.8, 1]");
}

std::vector<std::string> UniversalParams::warnings() const {
  std::vector<std::string> out;
  if (l > 1.0) out.push_back("l > 1: curved-display compensation");
  return out;
}

Vec2 universalViewCoord(const Vec2& f_st, const MappingVector& u) {
  return {2.0 * u.s * f_st.x - u.s, 2.0 * u.t * f_st.y - u.t};
}

UniversalSample universalProject(const Vec2& f_xy, const UniversalParams& p) {
  const double half = p.fov.radians() / 2.0;
  UniversalSample out;
  out.polar.f_xy = f_xy;
  const double r = std::sqrt(f_xy.x * f_xy.x + p.l * f_xy.y * f_xy.y);
  out.polar.radius = r;

  double theta = 0.0;
  if (p.k > 0.0) {
    theta = std::atan(r * std::tan(p.k * half)) / p.k;
  } else if (p.k < 0.0) {
    const double arg = r * std::sin(p.k * half);
    if (arg < -1.0 || arg > 1.0) {
      out.valid = false;
      return out;
    }
    theta = std::asin(arg) / p.k;
  } else {
    theta = r * half;
  }
  out.polar.theta = theta;
  out.polar.theta_prime = theta * std::max(std::abs(p.k), 0.5);

  const double ratio = r < kCenterEpsilon ? centerSlope(p) : std::tan(theta) / r;
  out.view = {ratio * f_xy.x, ratio * f_xy.y * anamorphicScale(p)};
  return out;
}

std::optional<Vec2> universalSTCoord(const Vec2& f_st, const UniversalParams& p, double aspect) {
  const MappingVector u = mappingVector(aspect, p.fov.type);
  const UniversalSample sample = universalProject(universalViewCoord(f_st, u), p);
  if (!sample.valid || !(sample.polar.theta < kPi / 2.0)) return std::nullopt;
  const double t = std::tan(p.fov.radians() / 2.0);
  return Vec2{sample.view.x / (2.0 * u.s * t) + 0.5, sample.view.y / (2.0 * u.t * t) + 0.5};
}

std::optional<Vec3> universalDirection(const Vec2& f_st, const UniversalParams& p, double aspect) {
  const MappingVector u = mappingVector(aspect, p.fov.type);
  const UniversalSample sample = universalProject(universalViewCoord(f_st, u), p);
  const double theta = sample.polar.theta;
  if (!sample.valid || !(theta <= kPi)) return std::nullopt;
  const double r = sample.polar.radius;
  const double ratio = r < kCenterEpsilon ? centerSlope(p) : std::sin(theta) / r;
  const Vec2& f = sample.polar.f_xy;
  const Vec3 d{ratio * f.x, ratio * f.y * anamorphicScale(p), std::cos(theta)};
  const double len = length(d);
  if (!(len > 0.0)) return std::nullopt;
  return d / len;
}

double gammaEncode(double w, double gamma) { return std::pow(std::max(w, 0.0), 1.0 / gamma); }

VignetteSample vignette(const PolarSample& sample, double k, double gamma) {
  VignetteSample v;
  const double tp = sample.theta_prime;
  if (tp >= kPi / 2.0) {
    v.spherical = 0.0;
  } else {
    const double cosine_law = std::cos(tp);
    const double tan_tp = std::tan(tp);
    const double inverse_square_law = 1.0 / (1.0 + tan_tp * tan_tp);
    const double weight = std::clamp(k + 0.5, 0.0, 1.0);
    v.spherical = cosine_law + (inverse_square_law - cosine_law) * weight;
  }

  const double r = sample.radius;
  const double theta = sample.theta;
  Vec3 ray{0.0, 0.0, std::cos(theta)};
  if (r >= kCenterEpsilon) {
    const double ratio = std::sin(theta) / r;
    ray.x = ratio * sample.f_xy.x;
    ray.y = ratio * sample.f_xy.y;
  }
  const double len2 = dot(ray, ray);
  v.cylindrical = len2 > 0.0 ? 1.0 / len2 : 1.0;

  v.value = v.spherical * v.cylindrical;
  v.encoded = gammaEncode(v.value, gamma);
  return v;
}

STMap universalSTMap(const UniversalParams& p, int width, int height, bool with_vignette) {
  p.validate();
  if (!(p.fov.degrees < 180.0)) {
    throw ValidationError("STMap output requires an angle of view below 180 degrees; "
                          "generate a Perspective Map instead");
  }
  STMap map(width, height, MapKind::Distort);
  map.metadata = universalMetadata(p);
  if (with_vignette) map.vignette = Grid<double>(width, height, 0.0);
  const double aspect = map.aspect();
  const MappingVector u = mappingVector(aspect, p.fov.type);

  parallelFor(0, height, [&](int y) {
    for (int x = 0; x < width; ++x) {
      const Vec2 f_st = texelCenter(x, y, width, height);
      const auto st = universalSTCoord(f_st, p, aspect);
      map.texels(x, y) = st.value_or(Vec2{});
      map.mask(x, y) = st ? 1.0 : 0.0;
      if (with_vignette && st) {
        const auto sample = universalProject(universalViewCoord(f_st, u), p);
        map.vignette(x, y) = vignette(sample.polar, p.k).value;
      }
    }
  });
  return map;
}

PerspectiveMap universalPerspectiveMap(const UniversalParams& p, int width, int height,
                                       bool with_vignette) {
  p.validate();
  if (p.k > 0.0 && !(p.k * p.fov.radians() < kPi)) {
    throw ValidationError("for k > 0 the product k*angle-of-view must stay below 180 degrees");
  }
  PerspectiveMap map(width, height);
  map.metadata = universalMetadata(p);
  if (with_vignette) map.vignette = Grid<double>(width, height, 0.0);
  const double aspect = map.aspect();
  const MappingVector u = mappingVector(aspect, p.fov.type);

  parallelFor(0, height, [&](int y) {
    for (int x = 0; x < width; ++x) {
      const Vec2 f_st = texelCenter(x, y, width, height);
      const auto dir = universalDirection(f_st, p, aspect);
      map.directions(x, y) = dir.value_or(Vec3{0.0, 0.0, 1.0});
      map.mask(x, y) = dir ? 1.0 : 0.0;
      if (with_vignette && dir) {
        const auto sample = universalProject(universalViewCoord(f_st, u), p);
        map.vignette(x, y) = vignette(sample.polar, p.k).value;
      }
    }
  });
  return map;
}

std::vector<std::string> LensParams::warnings() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < radial.size(); ++i) {
    if (std::abs(radial[i]) > 0.4) {
      out.push_back("k" + std::to_string(i + 1) + " outside suggested range [-0.4, 0.4]");
    }
  }
  auto check = [&](const Vec2& v, const char* name, double limit) {
    if (std::abs(v.x) > limit) out.push_back(std::string(name) + "1 outside suggested range");
    if (std::abs(v.y) > limit) out.push_back(std::string(name) + "2 outside suggested range");
  };
  check(prism, "p", 0.2);
  check(decentering, "q", 0.1);
  check(cardinal, "c", 0.2);
  return out;
}

std::optional<Vec2> lensDistortCoord(const Vec2& f_st, const LensParams& p, double aspect) {
  const MappingVector u = mappingVector(aspect, p.aov);
  const Vec2 f = universalViewCoord(f_st, u) - p.cardinal;
  const double r2 = dot(f, f);
  const Vec2 decentered = f + p.decentering * r2;
  const Vec2 prism = decentered + decentered * dot(p.prism, decentered);

  // At r = 1 numerator and denominator are summed identically, so the
  // factor is exactly 1.
  double numerator = 1.0;
  double denominator = 1.0;
  double power = 1.0;
  for (const double k : p.radial) {
    power *= r2;
    numerator += k;
    denominator += k * power;
  }
  if (!(std::abs(denominator) >= 1e-12)) return std::nullopt;
  const Vec2 radial = prism * (numerator / denominator);

  const Vec2 g = radial + p.cardinal;
  return Vec2{g.x / (2.0 * u.s) + 0.5, g.y / (2.0 * u.t) + 0.5};
}

STMap lensDistortSTMap(const LensParams& p, int width, int height) {
  STMap map(width, height, MapKind::Distort);
  map.metadata = {{"model", "lens"}, {"aov_axis", std::string(aovSymbol(p.aov))}};
  for (std::size_t i = 0; i < p.radial.size(); ++i) {
    map.metadata["k" + std::to_string(i + 1)] = formatNumber(p.radial[i]);
  }
  map.metadata["p1"] = formatNumber(p.prism.x);
  map.metadata["p2"] = formatNumber(p.prism.y);
  map.metadata["q1"] = formatNumber(p.decentering.x);
  map.metadata["q2"] = formatNumber(p.decentering.y);
  map.metadata["c1"] = formatNumber(p.cardinal.x);
  map.metadata["c2"] = formatNumber(p.cardinal.y);

  const double aspect = map.aspect();
  parallelFor(0, height, [&](int y) {
    for (int x = 0; x < width; ++x) {
      const auto st = lensDistortCoord(texelCenter(x, y, width, height), p, aspect);
      map.texels(x, y) = st.value_or(Vec2{});
      map.mask(x, y) = st ? 1.0 : 0.0;
    }
  });
  return map;
}

STMap perspectiveMapToSTMap(const PerspectiveMap& pm, const FieldOfView& fov, double z_near) {
  if (!(fov.degrees > 0.0 && fov.degrees < 180.0)) {
    throw ValidationError("Perspective Map to STMap conversion requires an angle of view "
                          "in (0, 180) degrees");
  }
  if (!(z_near > 0.0 && z_near < 1.0)) throw ValidationError("z_near must be in (0, 1)");

  STMap map(pm.width(), pm.height(), MapKind::Distort);
  map.metadata = pm.metadata;
  map.metadata["aov"] = formatFieldOfView(fov);
  map.metadata["z_near"] = formatNumber(z_near);
  const MappingVector u = mappingVector(map.aspect(), fov.type);
  const double cot = 1.0 / std::tan(fov.radians() / 2.0);
  auto valid = [&](int i, int j) { return pm.valid(i, j); };

  parallelFor(0, pm.height(), [&](int y) {
    for (int x = 0; x < pm.width(); ++x) {
      const Vec3& g = pm.directions(x, y);
      const double denom = std::max(z_near, g.z);
      map.texels(x, y) = {g.x / denom * cot / (2.0 * u.s) + 0.5,
                          g.y / denom * cot / (2.0 * u.t) + 0.5};
      if (!pm.valid(x, y)) {
        map.mask(x, y) = 0.0;
        continue;
      }
      const auto d = centralDifferences(pm.directions, valid, x, y);
      map.mask(x, y) = pixStep({g.z - z_near, d.ddx.z, d.ddy.z}) * pm.mask(x, y);
    }
  });
  return map;
}

namespace {

struct ScatterHit {
  Vec2 source;  // frame coordinate of the source texel
  double error = std::numeric_limits<double>::infinity();
};

}  // namespace

STMap invertSTMap(const STMap& distort) {
  const int w = distort.width();
  const int h = distort.height();
  STMap inverse(w, h, MapKind::Undistort);
  inverse.metadata = distort.metadata;
  inverse.metadata["inverted"] = "1";

  // Forward scatter: each source texel lands in the target texel containing
  // its stored coordinate; the closest landing wins.
  Grid<ScatterHit> hits(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!distort.valid(x, y)) continue;
      const Vec2 f = distort.texels(x, y);
      const double tx = std::floor(f.x * w);
      const double ty = std::floor(f.y * h);
      if (!(tx >= 0 && ty >= 0 && tx < w && ty < h)) continue;
      const int ix = static_cast<int>(tx);
      const int iy = static_cast<int>(ty);
      const double err = length(f - texelCenter(ix, iy, w, h));
      if (err < hits(ix, iy).error) hits(ix, iy) = {texelCenter(x, y, w, h), err};
    }
  }

  constexpr int kMaxIterations = 8;
  constexpr double kTolerance = 1e-5;
  constexpr int kSeedRadius = 3;
  const double hx = 0.5 / w;
  const double hy = 0.5 / h;

  parallelFor(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      const Vec2 target = texelCenter(x, y, w, h);

      // Seed from the own hit, else the nearest hit in a small ring search.
      std::optional<Vec2> seed;
      if (std::isfinite(hits(x, y).error)) seed = hits(x, y).source;
      for (int r = 1; !seed && r <= kSeedRadius; ++r) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = y - r; j <= y + r; ++j) {
          for (int i = x - r; i <= x + r; ++i) {
            if (i < 0 || j < 0 || i >= w || j >= h) continue;
            if (std::max(std::abs(i - x), std::abs(j - y)) != r) continue;
            if (!std::isfinite(hits(i, j).error)) continue;
            const double d = std::hypot(i - x, j - y);
            if (d < best) {
              best = d;
              seed = hits(i, j).source;
            }
          }
        }
      }
      if (!seed) {
        inverse.texels(x, y) = {};
        inverse.mask(x, y) = 0.0;
        continue;
      }

      Vec2 g = *seed;
      bool converged = false;
      for (int it = 0; it <= kMaxIterations; ++it) {
        const Vec2 residual = distort.sample(g) - target;
        if (std::max(std::abs(residual.x), std::abs(residual.y)) < kTolerance) {
          converged = true;
          break;
        }
        if (it == kMaxIterations) break;
        const Vec2 dx = (distort.sample({g.x + hx, g.y}) - distort.sample({g.x - hx, g.y})) /
                        (2.0 * hx);
        const Vec2 dy = (distort.sample({g.x, g.y + hy}) - distort.sample({g.x, g.y - hy})) /
                        (2.0 * hy);
        const double det = dx.x * dy.y - dy.x * dx.y;
        if (!(std::abs(det) > 1e-12)) break;
        g = g - Vec2{(dy.y * residual.x - dy.x * residual.y) / det,
                     (-dx.y * residual.x + dx.x * residual.y) / det};
        if (!isFinite(g)) break;
      }

      const bool inside = converged && g.x >= 0.0 && g.x <= 1.0 && g.y >= 0.0 && g.y <= 1.0;
      bool valid_source = false;
      if (inside) {
        const int sx = std::min(static_cast<int>(g.x * w), w - 1);
        const int sy = std::min(static_cast<int>(g.y * h), h - 1);
        valid_source = distort.valid(sx, sy);
      }
      if (inside && valid_source) {
        inverse.texels(x, y) = g;
        inverse.mask(x, y) = 1.0;
      } else {
        inverse.texels(x, y) = *seed;
        inverse.mask(x, y) = 0.0;
      }
    }
  });
  return inverse;
}

PerspectiveMap multiScreenPerspectiveMap(int screens, double vertical_fov_deg, int width,
                                         int height) {
  if (screens < 1) throw ValidationError("screen count must be positive");
  if (!(vertical_fov_deg > 0.0 && vertical_fov_deg < 180.0)) {
    throw ValidationError("per-screen vertical angle of view must be in (0, 180) degrees");
  }
  PerspectiveMap map(width, height);
  map.metadata = {{"model", "multiscreen"},
                  {"screens", std::to_string(screens)},
                  {"aov", "v" + formatNumber(vertical_fov_deg)}};

  const double panel_aspect = static_cast<double>(width) / screens / height;
  const double tan_v = std::tan(radians(vertical_fov_deg) / 2.0);
  const double panel_h = 2.0 * std::atan(panel_aspect * tan_v);

  parallelFor(0, height, [&](int y) {
    for (int x = 0; x < width; ++x) {
      const Vec2 f = texelCenter(x, y, width, height);
      const double scaled = f.x * screens;
      const int panel = std::min(static_cast<int>(scaled), screens - 1);
      const double local_s = scaled - panel;
      const Vec3 d{(2.0 * local_s - 1.0) * panel_aspect * tan_v, (2.0 * f.y - 1.0) * tan_v, 1.0};
      const double yaw = (panel - (screens - 1) / 2.0) * panel_h;
      const Vec3 r{d.x * std::cos(yaw) + d.z * std::sin(yaw), d.y,
                   -d.x * std::sin(yaw) + d.z * std::cos(yaw)};
      map.directions(x, y) = normalize(r);
    }
  });
  return map;
}

}  // namespace curvi
