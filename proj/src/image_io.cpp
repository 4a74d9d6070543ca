#include "curvi/image_io.hpp"

#include <png.h>

#include <ImfChannelList.h>
#include <ImfFrameBuffer.h>
#include <ImfHeader.h>
#include <ImfInputFile.h>
#include <ImfOutputFile.h>
#include <ImfStringAttribute.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <deque>
#include <fstream>

#include <json.hpp>

#include "curvi/error.hpp"

namespace curvi {

namespace {

constexpr std::string_view kRawMagic = "CURVIMAP 1";

struct LayerInfo {
  LayerSymbol symbol;
  std::string_view name;
  int channels;
};

constexpr LayerInfo kLayers[] = {
    {LayerSymbol::Pm, "Pm", 3},   {LayerSymbol::St, "St", 2},   {LayerSymbol::uSt, "uSt", 2},
    {LayerSymbol::P, "P", 1},     {LayerSymbol::V, "V", 1},     {LayerSymbol::M, "M", 1},
    {LayerSymbol::PmV, "PmV", 4}, {LayerSymbol::PmP, "PmP", 4}, {LayerSymbol::PmM, "PmM", 4},
    {LayerSymbol::StV, "StV", 3}, {LayerSymbol::StP, "StP", 3}, {LayerSymbol::StM, "StM", 3},
};

const LayerInfo& info(LayerSymbol s) {
  for (const auto& l : kLayers) {
    if (l.symbol == s) return l;
  }
  throw InternalError("unknown layer symbol");
}

std::string channelName(LayerSymbol layer, int c) {
  static constexpr const char* kSuffix[4] = {"R", "G", "B", "A"};
  const LayerInfo& l = info(layer);
  return std::string(l.name) + "." + (l.channels == 1 ? "Y" : kSuffix[c]);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool isExr(const std::filesystem::path& p) { return lower(p.extension().string()) == ".exr"; }
bool isPng(const std::filesystem::path& p) { return lower(p.extension().string()) == ".png"; }

// ---- file names ---------------------------------------------------------

bool allLayers(std::string_view content) {
  std::size_t start = 0;
  while (true) {
    const std::size_t us = content.find('_', start);
    const auto tok = content.substr(start, us == std::string_view::npos ? us : us - start);
    if (!parseLayerSymbol(tok)) return false;
    if (us == std::string_view::npos) return true;
    start = us + 1;
  }
}

std::vector<LayerSymbol> parseLayerList(std::string_view content, std::size_t offset) {
  std::vector<LayerSymbol> layers;
  std::size_t start = 0;
  while (true) {
    const std::size_t us = content.find('_', start);
    const auto tok = content.substr(start, us == std::string_view::npos ? us : us - start);
    const auto layer = parseLayerSymbol(tok);
    if (!layer) {
      throw ParseError("unknown layer symbol '" + std::string(tok) + "'", offset + start);
    }
    layers.push_back(*layer);
    if (us == std::string_view::npos) return layers;
    start = us + 1;
  }
}

// First token starts like an angle of view or a k/l/s value.
bool looksLikeProperties(std::string_view content) {
  const auto tok = content.substr(0, content.find('_'));
  if (tok.size() < 2) return false;
  const char c = tok.front();
  const char n = tok[1];
  const bool numeric = (n >= '0' && n <= '9') || n == '-' || n == '.';
  return (std::string_view("dhvkls").find(c) != std::string_view::npos && numeric) ||
         tok.rfind("4x3h", 0) == 0;
}

PerspectiveProperties parseProperties(std::string_view content, std::size_t offset) {
  PerspectiveProperties props;
  int next = 0;  // 0 fov, 1 k, 2 l, 3 s
  std::size_t start = 0;
  while (true) {
    const std::size_t us = content.find('_', start);
    const auto tok = content.substr(start, us == std::string_view::npos ? us : us - start);
    const std::size_t at = offset + start;
    if (tok.empty()) throw ParseError("empty property", at);

    const char key = tok.front();
    int slot = -1;
    if (key == 'k') slot = 1;
    if (key == 'l') slot = 2;
    if (key == 's') slot = 3;
    if (slot < 0) {
      if (next > 0) throw ParseError("unknown property '" + std::string(tok) + "'", at);
      try {
        props.fov = parseFieldOfView(tok);
      } catch (const ParseError& e) {
        throw ParseError("bad angle of view '" + std::string(tok) + "'", at + e.position());
      }
      next = 1;
    } else {
      if (slot < next) throw ParseError("properties out of order (fov, k, l, s)", at);
      const auto v = parseNumber(tok.substr(1));
      if (!v) throw ParseError("bad number in property '" + std::string(tok) + "'", at + 1);
      (slot == 1 ? props.k : slot == 2 ? props.l : props.s) = *v;
      next = slot + 1;
    }
    if (us == std::string_view::npos) return props;
    start = us + 1;
  }
}

// ---- EXR ----------------------------------------------------------------

void writeExr(const ChannelImage& img, const std::filesystem::path& path) {
  Imf::Header header(img.width, img.height);
  header.compression() = Imf::ZIP_COMPRESSION;
  for (const auto& [key, value] : img.attributes) {
    header.insert(key, Imf::StringAttribute(value));
  }

  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  std::deque<std::vector<float>> floats;
  std::deque<std::vector<unsigned>> uints;
  Imf::FrameBuffer fb;
  for (const auto& ch : img.channels) {
    if (ch.type == ImageChannel::Type::Float) {
      header.channels().insert(ch.name, Imf::Channel(Imf::FLOAT));
      auto& plane = floats.emplace_back(n);
      for (int y = 0; y < img.height; ++y) {
        std::copy_n(ch.values.begin() + static_cast<std::ptrdiff_t>(y) * img.width, img.width,
                    plane.begin() + static_cast<std::ptrdiff_t>(img.height - 1 - y) * img.width);
      }
      fb.insert(ch.name, Imf::Slice(Imf::FLOAT, reinterpret_cast<char*>(plane.data()),
                                    sizeof(float), sizeof(float) * img.width));
    } else {
      header.channels().insert(ch.name, Imf::Channel(Imf::UINT));
      auto& plane = uints.emplace_back(n);
      for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
          const float v = ch.values[static_cast<std::size_t>(y) * img.width + x];
          plane[static_cast<std::size_t>(img.height - 1 - y) * img.width + x] =
              static_cast<unsigned>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
        }
      }
      fb.insert(ch.name, Imf::Slice(Imf::UINT, reinterpret_cast<char*>(plane.data()),
                                    sizeof(unsigned), sizeof(unsigned) * img.width));
    }
  }
  try {
    Imf::OutputFile file(path.string().c_str(), header);
    file.setFrameBuffer(fb);
    file.writePixels(img.height);
  } catch (const std::exception& e) {
    throw IoError("cannot write " + path.string() + ": " + e.what());
  }
}

ChannelImage readExr(const std::filesystem::path& path) {
  ChannelImage img;
  try {
    Imf::InputFile file(path.string().c_str());
    const Imf::Header& header = file.header();
    const Imath::Box2i dw = header.dataWindow();
    img.width = dw.max.x - dw.min.x + 1;
    img.height = dw.max.y - dw.min.y + 1;
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;

    for (auto it = header.begin(); it != header.end(); ++it) {
      if (const auto* s = dynamic_cast<const Imf::StringAttribute*>(&it.attribute())) {
        img.attributes[it.name()] = s->value();
      }
    }

    std::deque<std::vector<float>> floats;
    std::deque<std::vector<unsigned>> uints;
    Imf::FrameBuffer fb;
    const auto origin = static_cast<std::ptrdiff_t>(dw.min.x) +
                        static_cast<std::ptrdiff_t>(dw.min.y) * img.width;
    for (auto it = header.channels().begin(); it != header.channels().end(); ++it) {
      ImageChannel ch;
      ch.name = it.name();
      if (it.channel().type == Imf::UINT) {
        ch.type = ImageChannel::Type::Byte;
        auto& plane = uints.emplace_back(n);
        fb.insert(it.name(), Imf::Slice(Imf::UINT,
                                        reinterpret_cast<char*>(plane.data() - origin),
                                        sizeof(unsigned), sizeof(unsigned) * img.width));
      } else {
        auto& plane = floats.emplace_back(n);
        fb.insert(it.name(), Imf::Slice(Imf::FLOAT,
                                        reinterpret_cast<char*>(plane.data() - origin),
                                        sizeof(float), sizeof(float) * img.width));
      }
      img.channels.push_back(std::move(ch));
    }
    file.setFrameBuffer(fb);
    file.readPixels(dw.min.y, dw.max.y);

    std::size_t fi = 0;
    std::size_t ui = 0;
    for (auto& ch : img.channels) {
      ch.values.resize(n);
      for (int y = 0; y < img.height; ++y) {
        const std::size_t src = static_cast<std::size_t>(img.height - 1 - y) * img.width;
        const std::size_t dst = static_cast<std::size_t>(y) * img.width;
        for (int x = 0; x < img.width; ++x) {
          ch.values[dst + x] = ch.type == ImageChannel::Type::Byte
                                   ? static_cast<float>(uints[ui][src + x]) / 255.0f
                                   : floats[fi][src + x];
        }
      }
      (ch.type == ImageChannel::Type::Byte ? ui : fi)++;
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError("cannot read " + path.string() + ": " + e.what());
  }
  return img;
}

// ---- raw fallback -------------------------------------------------------

template <typename T>
void putLittle(std::ostream& out, T v) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T getLittle(std::istream& in) {
  std::array<char, sizeof(T)> bytes{};
  in.read(bytes.data(), bytes.size());
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

void writeRaw(const ChannelImage& img, const std::filesystem::path& path) {
  nlohmann::json header;
  header["width"] = img.width;
  header["height"] = img.height;
  header["attributes"] = img.attributes;
  header["channels"] = nlohmann::json::array();
  for (const auto& ch : img.channels) {
    header["channels"].push_back(
        {{"name", ch.name}, {"type", ch.type == ImageChannel::Type::Float ? "float32" : "uint8"}});
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << kRawMagic << '\n' << header.dump() << '\n';
  for (const auto& ch : img.channels) {
    for (int y = img.height - 1; y >= 0; --y) {
      for (int x = 0; x < img.width; ++x) {
        const float v = ch.values[static_cast<std::size_t>(y) * img.width + x];
        if (ch.type == ImageChannel::Type::Float) {
          putLittle(out, v);
        } else {
          out.put(static_cast<char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)));
        }
      }
    }
  }
  if (!out) throw IoError("cannot write " + path.string());
}

ChannelImage readRaw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string magic;
  std::string header_line;
  std::getline(in, magic);
  if (magic != kRawMagic) throw IoError(path.string() + ": not a map file");
  std::getline(in, header_line);

  ChannelImage img;
  try {
    const auto header = nlohmann::json::parse(header_line);
    img.width = header.at("width").get<int>();
    img.height = header.at("height").get<int>();
    img.attributes = header.value("attributes", MapMetadata{});
    for (const auto& c : header.at("channels")) {
      ImageChannel ch;
      ch.name = c.at("name").get<std::string>();
      const auto type = c.at("type").get<std::string>();
      if (type == "uint8") {
        ch.type = ImageChannel::Type::Byte;
      } else if (type != "float32") {
        throw IoError(path.string() + ": unknown channel type " + type);
      }
      img.channels.push_back(std::move(ch));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": bad header: " + e.what());
  }
  if (img.width <= 0 || img.height <= 0) throw IoError(path.string() + ": bad dimensions");

  for (auto& ch : img.channels) {
    ch.values.resize(static_cast<std::size_t>(img.width) * img.height);
    for (int y = img.height - 1; y >= 0; --y) {
      for (int x = 0; x < img.width; ++x) {
        float& v = ch.values[static_cast<std::size_t>(y) * img.width + x];
        if (ch.type == ImageChannel::Type::Float) {
          v = getLittle<float>(in);
        } else {
          v = static_cast<float>(static_cast<unsigned char>(in.get())) / 255.0f;
        }
      }
    }
  }
  if (!in) throw IoError(path.string() + ": truncated payload");
  return img;
}

// ---- PNG ----------------------------------------------------------------

ChannelImage readPng(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw IoError("cannot read " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGBA;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError("cannot read " + path.string() + ": " + image.message);
  }
  ChannelImage img;
  img.width = static_cast<int>(image.width);
  img.height = static_cast<int>(image.height);
  for (const char* name : {"R", "G", "B", "A"}) {
    img.channels.push_back({name, ImageChannel::Type::Byte, {}});
  }
  for (int c = 0; c < 4; ++c) {
    auto& values = img.channels[c].values;
    values.resize(static_cast<std::size_t>(img.width) * img.height);
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        const std::size_t src = (static_cast<std::size_t>(img.height - 1 - y) * img.width + x) * 4;
        values[static_cast<std::size_t>(y) * img.width + x] = buf[src + c] / 255.0f;
      }
    }
  }
  return img;
}

// ---- maps ---------------------------------------------------------------

ImageChannel makeChannel(std::string name, ImageChannel::Type type, std::size_t n) {
  ImageChannel ch{std::move(name), type, {}};
  ch.values.resize(n);
  return ch;
}

// Layers to store: the ones named in the file name when it follows the
// naming convention, otherwise the value layer plus M (and V if present).
std::vector<LayerSymbol> storedLayers(const std::filesystem::path& path, LayerSymbol value,
                                      bool has_vignette) {
  try {
    auto d = parseMapFilename(path.filename().string());
    return d.layers;
  } catch (const ParseError&) {
  }
  std::vector<LayerSymbol> layers{value, LayerSymbol::M};
  if (has_vignette) layers.push_back(LayerSymbol::V);
  return layers;
}

struct MapPlanes {
  int width = 0;
  int height = 0;
  std::vector<std::vector<double>> value;  // per component
  const Grid<double>* mask = nullptr;
  const Grid<double>* vignette = nullptr;
  LayerSymbol value_layer;
  LayerSymbol with_mask;
  LayerSymbol with_vignette;
};

ChannelImage packMap(const MapPlanes& m, const std::vector<LayerSymbol>& layers,
                     const MapMetadata& metadata) {
  const std::size_t n = static_cast<std::size_t>(m.width) * m.height;
  const int comps = static_cast<int>(m.value.size());
  ChannelImage img{m.width, m.height, {}, metadata};

  auto addValue = [&](LayerSymbol layer) {
    for (int c = 0; c < comps; ++c) {
      auto ch = makeChannel(channelName(layer, c), ImageChannel::Type::Float, n);
      for (std::size_t i = 0; i < n; ++i) ch.values[i] = static_cast<float>(m.value[c][i]);
      img.channels.push_back(std::move(ch));
    }
  };
  auto addScalar = [&](LayerSymbol layer, int c, ImageChannel::Type type, const Grid<double>& g) {
    auto ch = makeChannel(channelName(layer, c), type, n);
    for (std::size_t i = 0; i < n; ++i) ch.values[i] = static_cast<float>(g.cells()[i]);
    img.channels.push_back(std::move(ch));
  };
  auto needVignette = [&](LayerSymbol layer) -> const Grid<double>& {
    if (m.vignette == nullptr) {
      throw ValidationError("layer " + std::string(layerName(layer)) +
                            " requested but the map has no vignette");
    }
    return *m.vignette;
  };

  bool has_value = false;
  for (LayerSymbol layer : layers) {
    if (layer == m.value_layer) {
      addValue(layer);
      has_value = true;
    } else if (layer == LayerSymbol::M) {
      addScalar(layer, 0, ImageChannel::Type::Byte, *m.mask);
    } else if (layer == LayerSymbol::V) {
      addScalar(layer, 0, ImageChannel::Type::Byte, needVignette(layer));
    } else if (layer == m.with_mask) {
      addValue(layer);
      addScalar(layer, comps, ImageChannel::Type::Float, *m.mask);
      has_value = true;
    } else if (layer == m.with_vignette) {
      addValue(layer);
      addScalar(layer, comps, ImageChannel::Type::Float, needVignette(layer));
      has_value = true;
    } else {
      throw ValidationError("layer " + std::string(layerName(layer)) +
                            " cannot be written from this map");
    }
  }
  if (!has_value) {
    throw ValidationError("file name lists no " + std::string(layerName(m.value_layer)) +
                          " layer");
  }
  return img;
}

// Finds the first of `candidates` whose channels are all present.
std::optional<LayerSymbol> findLayer(const ChannelImage& img,
                                     std::initializer_list<LayerSymbol> candidates) {
  for (LayerSymbol l : candidates) {
    bool ok = true;
    for (int c = 0; c < info(l).channels; ++c) ok = ok && img.find(channelName(l, c)) != nullptr;
    if (ok) return l;
  }
  return std::nullopt;
}

void readScalar(const ChannelImage& img, Grid<double>& out,
                std::initializer_list<std::pair<LayerSymbol, int>> sources) {
  for (const auto& [layer, c] : sources) {
    if (const ImageChannel* ch = img.find(channelName(layer, c))) {
      out = Grid<double>(img.width, img.height);
      for (std::size_t i = 0; i < ch->values.size(); ++i) out.cells()[i] = ch->values[i];
      return;
    }
  }
}

MapMetadata mapMetadata(const ChannelImage& img) {
  MapMetadata m = img.attributes;
  m.erase("curvi.kind");
  return m;
}

}  // namespace

std::string_view layerName(LayerSymbol layer) { return info(layer).name; }

std::optional<LayerSymbol> parseLayerSymbol(std::string_view name) {
  for (const auto& l : kLayers) {
    if (l.name == name) return l.symbol;
  }
  return std::nullopt;
}

bool PerspectiveProperties::operator==(const PerspectiveProperties& o) const {
  const bool fov_eq = fov.has_value() == o.fov.has_value() &&
                      (!fov || (fov->type == o.fov->type && fov->degrees == o.fov->degrees));
  return fov_eq && k == o.k && l == o.l && s == o.s;
}

bool MapFileDescriptor::operator==(const MapFileDescriptor& o) const {
  return description == o.description && layers == o.layers && properties == o.properties &&
         extension == o.extension;
}

std::string formatMapFilename(const MapFileDescriptor& d) {
  if (d.description.empty()) throw ValidationError("map description is empty");
  if (d.description.find_first_of("()/\\") != std::string::npos) {
    throw ValidationError("map description may not contain parentheses or slashes: " +
                          d.description);
  }
  if (d.layers.empty()) throw ValidationError("map file name needs at least one layer");
  if (d.extension.empty() || d.extension.find_first_of("._()/\\") != std::string::npos) {
    throw ValidationError("bad extension '" + d.extension + "'");
  }

  std::string name = d.description + "_";
  if (d.layers.size() == 1 && !d.properties) {
    name += layerName(d.layers.front());
  } else {
    name += "(";
    for (std::size_t i = 0; i < d.layers.size(); ++i) {
      if (i > 0) name += "_";
      name += layerName(d.layers[i]);
    }
    name += ")";
  }
  if (d.properties) {
    const auto& p = *d.properties;
    std::vector<std::string> parts;
    if (p.fov) parts.push_back(formatFieldOfView(*p.fov));
    if (p.k) parts.push_back("k" + formatNumber(*p.k));
    if (p.l) parts.push_back("l" + formatNumber(*p.l));
    if (p.s) parts.push_back("s" + formatNumber(*p.s));
    if (parts.empty()) throw ValidationError("perspective properties are empty");
    name += "_(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) name += "_";
      name += parts[i];
    }
    name += ")";
  }
  return name + "." + d.extension;
}

MapFileDescriptor parseMapFilename(std::string_view full) {
  // Positions are reported relative to the file name itself.
  if (const auto slash = full.find_last_of("/\\"); slash != std::string_view::npos) {
    full.remove_prefix(slash + 1);
  }
  const std::string_view name = full;
  MapFileDescriptor d;

  const std::size_t dot = name.rfind('.');
  const std::size_t close = name.rfind(')');
  if (dot == std::string_view::npos || (close != std::string_view::npos && dot < close)) {
    throw ParseError("missing file extension", name.size());
  }
  d.extension = std::string(name.substr(dot + 1));
  if (d.extension.empty()) throw ParseError("empty file extension", dot + 1);
  std::string_view stem = name.substr(0, dot);

  auto takeGroup = [&](std::string_view& s) -> std::pair<std::string_view, std::size_t> {
    const std::size_t open = s.rfind('(');
    if (open == std::string_view::npos) throw ParseError("unbalanced ')'", s.size() - 1);
    if (open == 0 || s[open - 1] != '_') throw ParseError("expected '_' before '('", open);
    const auto content = s.substr(open + 1, s.size() - open - 2);
    if (content.empty()) throw ParseError("empty group", open + 1);
    s = s.substr(0, open - 1);
    return {content, open + 1};
  };

  if (!stem.empty() && stem.back() == ')') {
    auto [content, at] = takeGroup(stem);
    // A second group in front means the last one holds the properties.
    const bool two_groups = !stem.empty() && stem.back() == ')';
    if (two_groups || !allLayers(content)) {
      if (!two_groups && !looksLikeProperties(content)) {
        d.layers = parseLayerList(content, at);
      }
      d.properties = parseProperties(content, at);
      if (!two_groups) {
        throw ParseError("expected a (layers) group before the properties", stem.size());
      }
      std::tie(content, at) = takeGroup(stem);
    }
    d.layers = parseLayerList(content, at);
  } else {
    const std::size_t us = stem.rfind('_');
    if (us == std::string_view::npos) throw ParseError("missing '_<layer>' suffix", stem.size());
    d.layers = parseLayerList(stem.substr(us + 1), us + 1);
    stem = stem.substr(0, us);
  }

  if (stem.empty()) throw ParseError("empty description", 0);
  if (const auto bad = stem.find_first_of("()"); bad != std::string_view::npos) {
    throw ParseError("parenthesis in description", bad);
  }
  d.description = std::string(stem);
  return d;
}

const ImageChannel* ChannelImage::find(std::string_view name) const {
  for (const auto& ch : channels) {
    if (ch.name == name) return &ch;
  }
  return nullptr;
}

void writeChannelImage(const ChannelImage& image, const std::filesystem::path& path) {
  for (const auto& ch : image.channels) {
    if (ch.values.size() != static_cast<std::size_t>(image.width) * image.height) {
      throw InternalError("channel " + ch.name + " has the wrong size");
    }
  }
  if (isExr(path)) {
    writeExr(image, path);
  } else if (isPng(path)) {
    throw ValidationError("PNG output goes through writeImage");
  } else {
    writeRaw(image, path);
  }
}

ChannelImage readChannelImage(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
  if (isExr(path)) return readExr(path);
  if (isPng(path)) return readPng(path);
  return readRaw(path);
}

void writeMap(const STMap& map, const std::filesystem::path& path) {
  requireEvenSize(map.width(), map.height(), "STMap");
  MapPlanes planes;
  planes.width = map.width();
  planes.height = map.height();
  planes.value.assign(2, std::vector<double>(map.texels.cells().size()));
  for (std::size_t i = 0; i < map.texels.cells().size(); ++i) {
    planes.value[0][i] = map.texels.cells()[i].x;
    planes.value[1][i] = map.texels.cells()[i].y;
  }
  planes.mask = &map.mask;
  planes.vignette = map.hasVignette() ? &map.vignette : nullptr;
  planes.value_layer = map.kind == MapKind::Distort ? LayerSymbol::St : LayerSymbol::uSt;
  planes.with_mask = LayerSymbol::StM;
  planes.with_vignette = LayerSymbol::StV;
  if (map.kind == MapKind::Undistort) {
    // Combined layers only exist for distort maps.
    planes.with_mask = planes.with_vignette = LayerSymbol::uSt;
  }

  MapMetadata meta = map.metadata;
  meta["curvi.kind"] = map.kind == MapKind::Distort ? "distort" : "undistort";
  auto img = packMap(planes, storedLayers(path, planes.value_layer, map.hasVignette()), meta);
  writeChannelImage(img, path);
}

void writeMap(const PerspectiveMap& map, const std::filesystem::path& path) {
  requireEvenSize(map.width(), map.height(), "PerspectiveMap");
  MapPlanes planes;
  planes.width = map.width();
  planes.height = map.height();
  planes.value.assign(3, std::vector<double>(map.directions.cells().size()));
  for (std::size_t i = 0; i < map.directions.cells().size(); ++i) {
    planes.value[0][i] = map.directions.cells()[i].x;
    planes.value[1][i] = map.directions.cells()[i].y;
    planes.value[2][i] = map.directions.cells()[i].z;
  }
  planes.mask = &map.mask;
  planes.vignette = map.hasVignette() ? &map.vignette : nullptr;
  planes.value_layer = LayerSymbol::Pm;
  planes.with_mask = LayerSymbol::PmM;
  planes.with_vignette = LayerSymbol::PmV;
  auto img = packMap(planes, storedLayers(path, LayerSymbol::Pm, map.hasVignette()), map.metadata);
  writeChannelImage(img, path);
}

STMap readSTMap(const std::filesystem::path& path) {
  const ChannelImage img = readChannelImage(path);
  const auto layer = findLayer(img, {LayerSymbol::St, LayerSymbol::uSt, LayerSymbol::StV,
                                     LayerSymbol::StM, LayerSymbol::StP});
  if (!layer) throw ValidationError(path.string() + ": no STMap layer");
  requireEvenSize(img.width, img.height, "STMap");

  const auto kind_attr = img.attributes.find("curvi.kind");
  const bool undistort = *layer == LayerSymbol::uSt ||
                         (kind_attr != img.attributes.end() && kind_attr->second == "undistort");
  STMap map(img.width, img.height, undistort ? MapKind::Undistort : MapKind::Distort);
  const ImageChannel* s = img.find(channelName(*layer, 0));
  const ImageChannel* t = img.find(channelName(*layer, 1));
  for (std::size_t i = 0; i < s->values.size(); ++i) {
    map.texels.cells()[i] = {s->values[i], t->values[i]};
  }
  readScalar(img, map.mask, {{LayerSymbol::M, 0}, {LayerSymbol::StM, 2}});
  readScalar(img, map.vignette, {{LayerSymbol::V, 0}, {LayerSymbol::StV, 2}});
  map.metadata = mapMetadata(img);
  return map;
}

PerspectiveMap readPerspectiveMap(const std::filesystem::path& path) {
  const ChannelImage img = readChannelImage(path);
  const auto layer =
      findLayer(img, {LayerSymbol::Pm, LayerSymbol::PmV, LayerSymbol::PmM, LayerSymbol::PmP});
  if (!layer) throw ValidationError(path.string() + ": no Perspective Map layer");
  requireEvenSize(img.width, img.height, "PerspectiveMap");

  PerspectiveMap map(img.width, img.height);
  const ImageChannel* c[3] = {img.find(channelName(*layer, 0)), img.find(channelName(*layer, 1)),
                              img.find(channelName(*layer, 2))};
  for (std::size_t i = 0; i < c[0]->values.size(); ++i) {
    map.directions.cells()[i] = {c[0]->values[i], c[1]->values[i], c[2]->values[i]};
  }
  readScalar(img, map.mask, {{LayerSymbol::M, 0}, {LayerSymbol::PmM, 3}});
  readScalar(img, map.vignette, {{LayerSymbol::V, 0}, {LayerSymbol::PmV, 3}});
  map.metadata = mapMetadata(img);
  return map;
}

std::uint8_t encodeLevel(double linear, double gamma) {
  const double w = std::clamp(linear, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(255.0 * std::pow(w, 1.0 / gamma)));
}

void writeImage(const Framebuffer& fb, const std::filesystem::path& path, double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
  std::vector<png_byte> buf(static_cast<std::size_t>(fb.width()) * fb.height() * 4);
  for (int y = 0; y < fb.height(); ++y) {
    for (int x = 0; x < fb.width(); ++x) {
      const double cov = fb.coverage(x, y);
      const Rgba& c = fb.data(x, y);
      const double un = cov > 0.0 ? 1.0 / cov : 0.0;
      png_byte* px = &buf[(static_cast<std::size_t>(fb.height() - 1 - y) * fb.width() + x) * 4];
      px[0] = encodeLevel(c.r * un, gamma);
      px[1] = encodeLevel(c.g * un, gamma);
      px[2] = encodeLevel(c.b * un, gamma);
      px[3] = static_cast<png_byte>(std::lround(255.0 * std::clamp(cov, 0.0, 1.0)));
    }
  }
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(fb.width());
  image.height = static_cast<png_uint_32>(fb.height());
  image.format = PNG_FORMAT_RGBA;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, buf.data(), 0, nullptr)) {
    throw IoError("cannot write " + path.string() + ": " + image.message);
  }
}

void writeFramebufferExr(const Framebuffer& fb, const std::filesystem::path& path) {
  const std::size_t n = static_cast<std::size_t>(fb.width()) * fb.height();
  ChannelImage img{fb.width(), fb.height(), {}, {}};
  for (const char* name : {"R", "G", "B", "A", "Cov.Y", "Z.Y"}) {
    img.channels.push_back(makeChannel(name, ImageChannel::Type::Float, n));
  }
  for (int y = 0; y < fb.height(); ++y) {
    for (int x = 0; x < fb.width(); ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * fb.width() + x;
      const Rgba& c = fb.data(x, y);
      img.channels[0].values[i] = static_cast<float>(c.r);
      img.channels[1].values[i] = static_cast<float>(c.g);
      img.channels[2].values[i] = static_cast<float>(c.b);
      img.channels[3].values[i] = static_cast<float>(c.a);
      img.channels[4].values[i] = static_cast<float>(fb.coverage(x, y));
      img.channels[5].values[i] = static_cast<float>(fb.depth(x, y));
    }
  }
  writeChannelImage(img, path);
}

}  // namespace curvi
