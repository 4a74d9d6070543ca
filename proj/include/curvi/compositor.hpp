#pragma once

// Front-to-back merging of fractional-coverage fragments.
//
// The coverage buffer Λᵇ records how much of each pixel is already occluded.
// An incoming fragment only contributes the uncovered remainder, so
// primitives must arrive nearest first. Data buffers hold color
// premultiplied by coverage, in linear space.

#include <optional>
#include <span>
#include <vector>

#include "curvi/primitive.hpp"
#include "curvi/vec.hpp"

namespace curvi {

class Framebuffer {
 public:
  // Throws ValidationError unless both sizes are even and positive.
  Framebuffer(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  double coverage(int x, int y) const { return coverage_[index(x, y)]; }
  const Rgba& data(int x, int y) const { return data_[index(x, y)]; }
  // Front-most depth (or distance) written to the pixel; +inf if none.
  double depth(int x, int y) const { return depth_[index(x, y)]; }

  double& coverage(int x, int y) { return coverage_[index(x, y)]; }
  Rgba& data(int x, int y) { return data_[index(x, y)]; }
  double& depth(int x, int y) { return depth_[index(x, y)]; }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<double> coverage_;
  std::vector<Rgba> data_;
  std::vector<double> depth_;
};

// min(Λᶠ, 1 − Λᵇ), times Λₐ when alpha blending.
double clipMask(double fragment, double buffer, std::optional<double> alpha = std::nullopt);

// Λᵇ + Λᶠ′. Throws InternalError if the sum exceeds 1 by more than 1e-9,
// which means the fragment was not clipped.
double mergeMask(double buffer, double clipped);

// Λᶠ′·Fᶠ + Fᵇ, per channel.
Rgba mergeData(const Rgba& buffer, const Rgba& fragment, double clipped);

enum class MergeMode {
  // Ordered fractional merge; requires front-to-back submission.
  FrontToBack,
  // Binary nearest-depth test for aliased rasterization; any order.
  DepthTest,
};

struct CompositeOptions {
  MergeMode mode = MergeMode::FrontToBack;
  // Scale the clipped mask by fragment alpha.
  bool alpha_to_coverage = false;
};

// Merges one fragment into the buffers. Safe to call concurrently for
// distinct pixels.
void mergeFragment(Framebuffer& fb, const Fragment& frag, const CompositeOptions& options);

// Fills the uncovered remainder (1 − Λᵇ) of every pixel with `background`.
void fillBackground(Framebuffer& fb, const Rgba& background);

struct OrderedPrimitiveList {
  std::vector<std::size_t> order;  // indices into the submitted list
  std::vector<double> keys;        // sort key of order[i]
};

// Sorts by nearest-vertex distance to `eye`, ascending; equal keys keep
// submission order. Interpenetrating or cyclically overlapping triangles
// have no correct order and are drawn best-effort.
OrderedPrimitiveList sortFrontToBack(std::span<const ViewTriangle> primitives,
                                     const Vec3& eye = {});

}  // namespace curvi
