#include "top/grid_map.hpp"

#include <fstream>
#include <sstream>

namespace top {

namespace {

bool known_cell(char c) {
  switch (c) {
    case '.':
    case 'G':
    case '@':
    case 'O':
    case 'T':
    case 'S':
    case 'W':
      return true;
    default:
      return false;
  }
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

GridMap parse_map(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  GridMap map;
  int lineno = 0;
  bool saw_type = false, saw_height = false, saw_width = false;
  // Header: type/height/width in any order, then the `map` marker.
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "type") {
      ls >> map.type;
      saw_type = true;
    } else if (key == "height") {
      if (!(ls >> map.height) || map.height <= 0) throw ParseError("invalid height", lineno);
      saw_height = true;
    } else if (key == "width") {
      if (!(ls >> map.width) || map.width <= 0) throw ParseError("invalid width", lineno);
      saw_width = true;
    } else if (key == "map") {
      break;
    } else {
      throw ParseError("unexpected header line '" + key + "'", lineno);
    }
  }
  if (!saw_type || !saw_height || !saw_width)
    throw ParseError("incomplete header (need type, height, width, map)", lineno);

  for (int row = 0; row < map.height; ++row) {
    if (!std::getline(in, line)) throw ParseError("missing map row " + std::to_string(row + 1), lineno);
    ++lineno;
    line = strip_cr(line);
    if ((int)line.size() != map.width)
      throw ParseError("row " + std::to_string(row + 1) + " has " + std::to_string(line.size()) +
                           " cells, expected " + std::to_string(map.width),
                       lineno);
    for (int col = 0; col < map.width; ++col)
      if (!known_cell(line[col]))
        throw ParseError(std::string("unknown cell character '") + line[col] + "'", lineno, col + 1);
    map.cells.push_back(line);
  }
  return map;
}

std::string serialize_map(const GridMap& map) {
  std::ostringstream out;
  out << "type " << map.type << "\n";
  out << "height " << map.height << "\n";
  out << "width " << map.width << "\n";
  out << "map\n";
  for (const auto& row : map.cells) out << row << "\n";
  return out.str();
}

GridMap load_map_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open map file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_map(ss.str());
}

}  // namespace top
