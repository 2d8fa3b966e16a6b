#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace top {

// Parse/serialize error with the offending position (1-based line, column).
struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(const std::string& msg, int line_, int column_ = 0)
      : std::runtime_error(msg + " (line " + std::to_string(line_) +
                           (column_ > 0 ? ", column " + std::to_string(column_) : "") + ")"),
        line(line_),
        column(column_) {}
};

// Moving AI benchmark map. `cells` keeps the original characters so that
// serialization reproduces the input grid byte-for-byte.
struct GridMap {
  int width = 0;
  int height = 0;
  std::string type = "octile";
  std::vector<std::string> cells;  // height rows of width chars

  bool passable(int x, int y) const {
    char c = cells[y][x];
    return c == '.' || c == 'G';
  }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

GridMap parse_map(const std::string& text);
std::string serialize_map(const GridMap& map);
GridMap load_map_file(const std::string& path);

}  // namespace top
