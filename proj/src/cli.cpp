#include "curvi/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <string>
#include <vector>

#include "curvi/error.hpp"
#include "curvi/image_io.hpp"
#include "curvi/mapgen.hpp"
#include "curvi/parallel.hpp"
#include "curvi/render.hpp"
#include "curvi/scene.hpp"

namespace curvi {

namespace {

struct Size {
  int width = 0;
  int height = 0;
};

Size parseSize(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw ValidationError("size must look like 512x512: " + text);
  const auto w = parseNumber(text.substr(0, x));
  const auto h = parseNumber(text.substr(x + 1));
  if (!w || !h || *w != std::floor(*w) || *h != std::floor(*h) || *w <= 0 || *h <= 0 ||
      *w > 65536 || *h > 65536) {
    throw ValidationError("bad size: " + text);
  }
  return {static_cast<int>(*w), static_cast<int>(*h)};
}

AovType parseAovType(const std::string& text) {
  for (AovType t :
       {AovType::Horizontal, AovType::Vertical, AovType::Diagonal, AovType::Horizontal4x3}) {
    if (aovSymbol(t) == text) return t;
  }
  throw ValidationError("angle-of-view type must be h, v, d or 4x3h: " + text);
}

std::vector<LayerSymbol> mapLayers(LayerSymbol value, bool vignette) {
  std::vector<LayerSymbol> layers{value};
  if (vignette) layers.push_back(LayerSymbol::V);
  layers.push_back(LayerSymbol::M);
  return layers;
}

std::filesystem::path outputPath(const std::string& out, const std::string& description,
                                 std::vector<LayerSymbol> layers,
                                 std::optional<PerspectiveProperties> props) {
  if (!out.empty()) return out;
  return formatMapFilename({description, std::move(layers), std::move(props), "exr"});
}

void warn(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

std::optional<FieldOfView> metadataFov(const MapMetadata& m) {
  const auto it = m.find("aov");
  if (it == m.end()) return std::nullopt;
  try {
    return parseFieldOfView(it->second);
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

StepVariant parseVariant(const std::string& v) {
  if (v == "I") return StepVariant::Length;
  if (v == "II") return StepVariant::FWidth;
  if (v == "III") return StepVariant::TwiceLength;
  throw ValidationError("step variant must be I, II or III: " + v);
}

struct ChannelDiff {
  std::string name;
  double max = 0.0;
  double mean = 0.0;
};

std::vector<ChannelDiff> diffImages(const ChannelImage& a, const ChannelImage& b) {
  if (a.width != b.width || a.height != b.height) {
    throw ValidationError("images differ in size: " + std::to_string(a.width) + "x" +
                          std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                          std::to_string(b.height));
  }
  std::vector<ChannelDiff> out;
  for (const auto& ca : a.channels) {
    const ImageChannel* cb = b.find(ca.name);
    if (cb == nullptr) throw ValidationError("channel " + ca.name + " missing in second image");
    ChannelDiff d{ca.name};
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < ca.values.size(); ++i) {
      const double va = ca.values[i];
      const double vb = cb->values[i];
      // Matching infinities (empty depth) count as equal.
      const double e = va == vb ? 0.0 : std::abs(va - vb);
      if (std::isnan(e)) {
        d.max = std::numeric_limits<double>::infinity();
        continue;
      }
      d.max = std::max(d.max, e);
      sum += e;
      ++n;
    }
    d.mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    out.push_back(d);
  }
  for (const auto& cb : b.channels) {
    if (a.find(cb.name) == nullptr) {
      throw ValidationError("channel " + cb.name + " missing in first image");
    }
  }
  return out;
}

}  // namespace

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curvilinear rasterization tools"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  // genmap
  auto* genmap = app.add_subcommand("genmap", "Generate a rasterization map");
  genmap->require_subcommand(1);

  auto* universal = genmap->add_subcommand("universal", "Universal Perspective map");
  std::string u_size;
  std::string u_fov = "h90";
  UniversalParams up;
  bool u_pmap = false;
  bool u_vignette = false;
  std::string u_out;
  std::string u_desc = "Universal";
  universal->add_option("--size", u_size, "Resolution WxH (even)")->required();
  universal->add_option("--fov", u_fov, "Angle of view, e.g. h90, v60, d140, 4x3h120");
  universal->add_option("--k", up.k, "Perspective type k in [-1, 1]");
  universal->add_option("--l", up.l, "Spherical (1) to cylindrical (0) blend l");
  universal->add_option("--s", up.s, "Anamorphic correction s in [0.8, 1]");
  universal->add_flag("--pmap", u_pmap, "Write a Perspective Map instead of an STMap");
  universal->add_flag("--vignette", u_vignette, "Include the natural-vignetting layer");
  universal->add_option("--out", u_out, "Output path (default: naming convention)");
  universal->add_option("--desc", u_desc, "Description part of the default file name");

  auto* lens = genmap->add_subcommand("lens", "Lens-distortion STMap");
  std::string l_size;
  std::string l_aov = "d";
  std::vector<double> l_radial;
  std::vector<double> l_prism;
  std::vector<double> l_decenter;
  std::vector<double> l_cardinal;
  std::string l_out;
  std::string l_desc = "Lens";
  lens->add_option("--size", l_size, "Resolution WxH (even)")->required();
  lens->add_option("--aov", l_aov, "Normalization axis: h, v, d or 4x3h");
  lens->add_option("--radial", l_radial, "Radial coefficients k1,k2,...")->delimiter(',');
  lens->add_option("--prism", l_prism, "Thin-prism coefficients p1,p2")->delimiter(',')->expected(2);
  lens->add_option("--decenter", l_decenter, "Decentering coefficients q1,q2")
      ->delimiter(',')
      ->expected(2);
  lens->add_option("--cardinal", l_cardinal, "Cardinal offset c1,c2")->delimiter(',')->expected(2);
  lens->add_option("--out", l_out, "Output path (default: naming convention)");
  lens->add_option("--desc", l_desc, "Description part of the default file name");

  // convert
  auto* convert = app.add_subcommand("convert", "Convert between map types");
  convert->require_subcommand(1);
  auto* pm2st = convert->add_subcommand("pm2st", "Perspective Map to STMap");
  std::string c_in;
  std::string c_fov;
  double c_zn = 0.01;
  std::string c_out;
  pm2st->add_option("--in", c_in, "Perspective Map file")->required();
  pm2st->add_option("--fov", c_fov, "Angle of view of the STMap (below 180)")->required();
  pm2st->add_option("--zn", c_zn, "Near-plane distance for the bounds mask");
  pm2st->add_option("--out", c_out, "Output STMap path")->required();

  // invert
  auto* invert = app.add_subcommand("invert", "Invert a distort STMap");
  std::string i_in;
  std::string i_out;
  invert->add_option("--in", i_in, "Distort STMap file")->required();
  invert->add_option("--out", i_out, "Output undistort STMap path")->required();

  // rasterize
  auto* raster = app.add_subcommand("rasterize", "Render a scene");
  std::string r_mode = "rect";
  std::string r_scene;
  std::string r_map;
  std::string r_size;
  std::string r_fov;
  bool r_no_aa = false;
  std::string r_variant = "I";
  bool r_cull = false;
  std::string r_out;
  std::string r_exr;
  double r_gamma = 2.2;
  bool r_no_vignette = false;
  raster->add_option("--mode", r_mode, "rect, stmap or pmap")
      ->check(CLI::IsMember({"rect", "stmap", "pmap"}));
  raster->add_option("--scene", r_scene, "Scene file")->required();
  raster->add_option("--map", r_map, "STMap or Perspective Map (stmap/pmap modes)");
  raster->add_option("--size", r_size, "Framebuffer WxH (rect mode)");
  raster->add_option("--fov", r_fov, "Camera angle of view (default: map metadata, else h90)");
  raster->add_flag("--no-aa", r_no_aa, "Binary coverage with depth test");
  raster->add_option("--variant", r_variant, "Edge-step variant I, II or III");
  raster->add_flag("--cull", r_cull, "Drop clockwise triangles");
  raster->add_option("--out", r_out, "PNG output");
  raster->add_option("--exr", r_exr, "Linear EXR output (RGBA, coverage, depth)");
  raster->add_option("--gamma", r_gamma, "Display gamma of the PNG output");
  raster->add_flag("--no-vignette", r_no_vignette, "Ignore the map's vignette layer");

  // diff
  auto* diff = app.add_subcommand("diff", "Per-channel error between two maps or images");
  std::string d_a;
  std::string d_b;
  std::optional<double> d_tol;
  diff->add_option("a", d_a, "First file")->required();
  diff->add_option("b", d_b, "Second file")->required();
  diff->add_option("--tolerance", d_tol, "Fail (exit 1) if any channel max exceeds this");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    setThreadCount(threads);

    if (*universal) {
      const Size size = parseSize(u_size);
      up.fov = parseFieldOfView(u_fov);
      up.validate();
      warn(err, up.warnings());
      const PerspectiveProperties props{up.fov, up.k, up.l, up.s};
      if (u_pmap) {
        const auto map =
            universalPerspectiveMap(up, size.width, size.height, u_vignette);
        const auto path = outputPath(u_out, u_desc, mapLayers(LayerSymbol::Pm, u_vignette), props);
        writeMap(map, path);
        out << path.string() << "\n";
      } else {
        const auto map = universalSTMap(up, size.width, size.height, u_vignette);
        const auto path = outputPath(u_out, u_desc, mapLayers(LayerSymbol::St, u_vignette), props);
        writeMap(map, path);
        out << path.string() << "\n";
      }
      return kExitOk;
    }

    if (*lens) {
      const Size size = parseSize(l_size);
      LensParams lp;
      lp.aov = parseAovType(l_aov);
      if (!l_radial.empty()) lp.radial = l_radial;
      if (!l_prism.empty()) lp.prism = {l_prism[0], l_prism[1]};
      if (!l_decenter.empty()) lp.decentering = {l_decenter[0], l_decenter[1]};
      if (!l_cardinal.empty()) lp.cardinal = {l_cardinal[0], l_cardinal[1]};
      warn(err, lp.warnings());
      const auto map = lensDistortSTMap(lp, size.width, size.height);
      const auto path = outputPath(l_out, l_desc, mapLayers(LayerSymbol::St, false), std::nullopt);
      writeMap(map, path);
      out << path.string() << "\n";
      return kExitOk;
    }

    if (*pm2st) {
      const auto pm = readPerspectiveMap(c_in);
      const auto st = perspectiveMapToSTMap(pm, parseFieldOfView(c_fov), c_zn);
      writeMap(st, c_out);
      out << c_out << "\n";
      return kExitOk;
    }

    if (*invert) {
      const auto st = readSTMap(i_in);
      if (st.kind != MapKind::Distort) throw ValidationError(i_in + " is not a distort STMap");
      writeMap(invertSTMap(st), i_out);
      out << i_out << "\n";
      return kExitOk;
    }

    if (*raster) {
      if (r_out.empty() && r_exr.empty()) throw ValidationError("give --out and/or --exr");
      const Scene scene = loadScene(r_scene);
      RenderSettings settings;
      settings.raster.antialias = !r_no_aa;
      settings.raster.variant = parseVariant(r_variant);
      settings.raster.cull_back_faces = r_cull;
      settings.apply_vignette = !r_no_vignette;
      if (!r_fov.empty()) settings.fov = parseFieldOfView(r_fov);

      RenderStats stats;
      std::optional<Framebuffer> fb;
      if (r_mode == "rect") {
        if (r_size.empty()) throw ValidationError("rect mode needs --size");
        const Size size = parseSize(r_size);
        fb.emplace(renderRectilinear(scene, size.width, size.height, settings, &stats));
      } else {
        if (r_map.empty()) throw ValidationError(r_mode + " mode needs --map");
        if (r_mode == "stmap") {
          const STMap map = readSTMap(r_map);
          if (r_fov.empty()) settings.fov = metadataFov(map.metadata).value_or(settings.fov);
          fb.emplace(renderSTMap(scene, map, settings, &stats));
        } else {
          fb.emplace(renderPerspectiveMap(scene, readPerspectiveMap(r_map), settings, &stats));
        }
      }
      if (stats.behind_eye > 0) {
        err << "warning: " << stats.behind_eye
            << " triangle(s) reach behind the eye and were skipped\n";
      }
      if (stats.degenerate > 0) {
        err << "warning: " << stats.degenerate << " degenerate triangle(s) skipped\n";
      }
      if (!r_out.empty()) writeImage(*fb, r_out, r_gamma);
      if (!r_exr.empty()) writeFramebufferExr(*fb, r_exr);
      out << "triangles " << stats.submitted << " drawn " << stats.drawn << "\n";
      return kExitOk;
    }

    if (*diff) {
      const auto rows = diffImages(readChannelImage(d_a), readChannelImage(d_b));
      double worst = 0.0;
      out << std::setprecision(9);
      for (const auto& r : rows) {
        out << r.name << " max " << r.max << " mean " << r.mean << "\n";
        worst = std::max(worst, r.max);
      }
      out << "overall max " << worst << "\n";
      if (d_tol && !(worst <= *d_tol)) return kExitFailure;
      return kExitOk;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return dynamic_cast<const InternalError*>(&e) != nullptr ? kExitFailure : kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace curvi
