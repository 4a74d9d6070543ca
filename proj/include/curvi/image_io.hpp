#pragma once

// Reading and writing maps, rendered images and scenes.
//
// Maps go to OpenEXR when the path ends in ".exr" and to a small raw format
// otherwise (a "CURVIMAP 1" line, one JSON header line, then channel planes
// of little-endian float32 or uint8). Both store rows top-down.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curvi/compositor.hpp"
#include "curvi/maps.hpp"

namespace curvi {

// Layer symbols of the map naming convention.
enum class LayerSymbol {
  Pm,   // Perspective Map
  St,   // STMap
  uSt,  // undistort STMap
  P,    // parallax map
  V,    // vignette
  M,    // mask
  PmV,
  PmP,
  PmM,
  StV,
  StP,
  StM,
};

std::string_view layerName(LayerSymbol layer);
std::optional<LayerSymbol> parseLayerSymbol(std::string_view name);

// Optional perspective properties of a file name, written in this order.
struct PerspectiveProperties {
  std::optional<FieldOfView> fov;
  std::optional<double> k;
  std::optional<double> l;
  std::optional<double> s;

  bool operator==(const PerspectiveProperties&) const;
};

struct MapFileDescriptor {
  std::string description;
  std::vector<LayerSymbol> layers;
  std::optional<PerspectiveProperties> properties;
  std::string extension = "exr";

  bool operator==(const MapFileDescriptor&) const;
};

// "<desc>_<Layer>.exr" for a single layer without properties, otherwise
// "<desc>_(<L1>_<L2>)[_(<aov><deg>_k<k>_l<l>_s<s>)].exr". Throws
// ValidationError for an empty description, a description with
// parentheses, or no layers.
std::string formatMapFilename(const MapFileDescriptor& d);

// Inverse of formatMapFilename; accepts a bare file name or a path. Throws
// ParseError with the offending character position.
MapFileDescriptor parseMapFilename(std::string_view name);

// Channel container shared by every file format. Rows are stored bottom-up
// like the in-memory maps.
struct ImageChannel {
  enum class Type { Float, Byte };

  std::string name;
  Type type = Type::Float;
  // width·height values; Byte channels hold k/255.
  std::vector<float> values;
};

struct ChannelImage {
  int width = 0;
  int height = 0;
  std::vector<ImageChannel> channels;
  MapMetadata attributes;

  const ImageChannel* find(std::string_view name) const;
};

void writeChannelImage(const ChannelImage& image, const std::filesystem::path& path);
// Reads .exr, .png or the raw format. PNG channels are R, G, B, A as k/255.
ChannelImage readChannelImage(const std::filesystem::path& path);

// Maps. Values are stored as float32, vignette and mask as 8-bit.
void writeMap(const STMap& map, const std::filesystem::path& path);
void writeMap(const PerspectiveMap& map, const std::filesystem::path& path);
STMap readSTMap(const std::filesystem::path& path);
PerspectiveMap readPerspectiveMap(const std::filesystem::path& path);

// Rendered output. PNG: 8-bit RGBA, color un-premultiplied by coverage and
// gamma encoded, alpha = coverage. EXR: linear premultiplied RGBA plus
// coverage (Cov.Y) and depth (Z.Y).
void writeImage(const Framebuffer& fb, const std::filesystem::path& path, double gamma = 2.2);
void writeFramebufferExr(const Framebuffer& fb, const std::filesystem::path& path);

// round(255·w^(1/γ)) of a linear value clamped to [0, 1].
std::uint8_t encodeLevel(double linear, double gamma);

}  // namespace curvi
