#include "curvi/scene.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "curvi/error.hpp"
#include "curvi/maps.hpp"

namespace curvi {

namespace {

std::vector<double> readNumbers(std::istringstream& fields, std::size_t line) {
  std::vector<double> values;
  std::string tok;
  while (fields >> tok) {
    const auto v = parseNumber(tok);
    if (!v) throw ParseError("line " + std::to_string(line) + ": bad number '" + tok + "'", line);
    if (!std::isfinite(*v)) {
      throw ParseError("line " + std::to_string(line) + ": non-finite value '" + tok + "'", line);
    }
    values.push_back(*v);
  }
  return values;
}

}  // namespace

Scene parseScene(std::istream& in) {
  Scene scene;
  std::array<Vec3, 3> pos{};
  std::array<VertexAttributes, 3> attr{};
  int pending = 0;
  std::size_t last_vertex_line = 0;

  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    std::istringstream fields(text);
    std::string keyword;
    if (!(fields >> keyword)) continue;

    const auto values = readNumbers(fields, line);
    if (keyword == "background") {
      if (values.size() != 3 && values.size() != 4) {
        throw ParseError("line " + std::to_string(line) + ": background needs r g b [a]", line);
      }
      scene.background = {values[0], values[1], values[2], values.size() == 4 ? values[3] : 1.0};
    } else if (keyword == "v") {
      if (values.size() != 9) {
        throw ParseError(
            "line " + std::to_string(line) + ": vertex needs x y z r g b a u v (9 numbers)", line);
      }
      pos[pending] = {values[0], values[1], values[2]};
      attr[pending].color = {values[3], values[4], values[5], values[6]};
      attr[pending].uv = {values[7], values[8]};
      last_vertex_line = line;
      if (++pending == 3) {
        scene.triangles.push_back({pos, attr});
        pending = 0;
      }
    } else {
      throw ParseError("line " + std::to_string(line) + ": unknown record '" + keyword + "'",
                       line);
    }
  }
  if (pending != 0) {
    throw ParseError("line " + std::to_string(last_vertex_line) + ": incomplete triangle",
                     last_vertex_line);
  }
  return scene;
}

Scene loadScene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene " + path.string());
  return parseScene(in);
}

}  // namespace curvi
