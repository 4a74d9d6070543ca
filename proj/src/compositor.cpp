#include "curvi/compositor.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "curvi/error.hpp"

namespace curvi {

Framebuffer::Framebuffer(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0 || width % 2 != 0 || height % 2 != 0) {
    throw ValidationError("framebuffer size must be an even number in both dimensions, got " +
                          std::to_string(width) + "x" + std::to_string(height));
  }
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  coverage_.assign(n, 0.0);
  data_.assign(n, Rgba{});
  depth_.assign(n, std::numeric_limits<double>::infinity());
}

double clipMask(double fragment, double buffer, std::optional<double> alpha) {
  const double clipped = std::min(fragment, 1.0 - buffer);
  return alpha ? clipped * *alpha : clipped;
}

double mergeMask(double buffer, double clipped) {
  const double merged = buffer + clipped;
  if (merged > 1.0 + 1e-9) {
    throw InternalError("mergeMask: coverage " + std::to_string(merged) + " exceeds 1");
  }
  return std::min(merged, 1.0);
}

Rgba mergeData(const Rgba& buffer, const Rgba& fragment, double clipped) {
  return fragment * clipped + buffer;
}

void mergeFragment(Framebuffer& fb, const Fragment& frag, const CompositeOptions& options) {
  if (!fb.contains(frag.x, frag.y)) return;
  double& cov = fb.coverage(frag.x, frag.y);
  Rgba& data = fb.data(frag.x, frag.y);
  double& depth = fb.depth(frag.x, frag.y);

  if (options.mode == MergeMode::DepthTest) {
    if (frag.coverage > 0.0 && frag.depth < depth) {
      depth = frag.depth;
      cov = 1.0;
      data = frag.color;
    }
    return;
  }

  const std::optional<double> alpha =
      options.alpha_to_coverage ? std::optional<double>(frag.color.a) : std::nullopt;
  const double clipped = clipMask(frag.coverage, cov, alpha);
  if (clipped <= 0.0) return;
  cov = mergeMask(cov, clipped);
  data = mergeData(data, frag.color, clipped);
  depth = std::min(depth, frag.depth);
}

void fillBackground(Framebuffer& fb, const Rgba& background) {
  for (int y = 0; y < fb.height(); ++y) {
    for (int x = 0; x < fb.width(); ++x) {
      const double rest = 1.0 - fb.coverage(x, y);
      if (rest <= 0.0) continue;
      fb.data(x, y) = mergeData(fb.data(x, y), background, rest);
      fb.coverage(x, y) = 1.0;
    }
  }
}

OrderedPrimitiveList sortFrontToBack(std::span<const ViewTriangle> primitives, const Vec3& eye) {
  std::vector<double> key(primitives.size());
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    const auto& p = primitives[i].position;
    key[i] = std::min({length(p[0] - eye), length(p[1] - eye), length(p[2] - eye)});
  }
  OrderedPrimitiveList out;
  out.order.resize(primitives.size());
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  out.keys.reserve(key.size());
  for (auto i : out.order) out.keys.push_back(key[i]);
  return out;
}

}  // namespace curvi
