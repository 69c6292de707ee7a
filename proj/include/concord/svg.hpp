#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "concord/error.hpp"
#include "concord/linalg.hpp"

namespace concord {

namespace detail {

inline std::string heat_color(double v) {
  if (v < 0.0) v = 0.0;
  if (v > 1.0) v = 1.0;
  // light to dark blue ramp over [0, 1]
  const int r = static_cast<int>(247 + v * (8 - 247) + 0.5);
  const int g = static_cast<int>(251 + v * (81 - 251) + 0.5);
  const int b = static_cast<int>(255 + v * (156 - 255) + 0.5);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "rgb(%d,%d,%d)", r, g, b);
  return buf;
}

inline std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace detail

/// Grid heatmap on a fixed 0..1 ramp; each cell prints its value to two
/// decimals so the image can be checked against the report.
inline std::string heatmap_svg(const std::string& title,
                               const std::vector<std::string>& row_labels,
                               const std::vector<std::string>& col_labels, const Matrix& values) {
  if (values.size() != row_labels.size()) throw Error("heatmap rows do not match labels");
  for (const auto& row : values)
    if (row.size() != col_labels.size()) throw Error("heatmap columns do not match labels");

  const int cell_w = 72, cell_h = 44, left = 140, top = 64;
  const int width = left + cell_w * static_cast<int>(col_labels.size()) + 20;
  const int height = top + cell_h * static_cast<int>(row_labels.size()) + 20;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + std::to_string(left) + "\" y=\"24\" font-size=\"16\" font-weight=\"bold\">" +
         title + "</text>\n";
  for (std::size_t c = 0; c < col_labels.size(); ++c) {
    const int x = left + static_cast<int>(c) * cell_w + cell_w / 2;
    svg += "<text x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(top - 10) +
           "\" font-size=\"13\" text-anchor=\"middle\">" + col_labels[c] + "</text>\n";
  }
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    const int y = top + static_cast<int>(r) * cell_h + cell_h / 2 + 5;
    svg += "<text x=\"" + std::to_string(left - 10) + "\" y=\"" + std::to_string(y) +
           "\" font-size=\"13\" text-anchor=\"end\">" + row_labels[r] + "</text>\n";
    for (std::size_t c = 0; c < col_labels.size(); ++c) {
      const double v = values[r][c];
      const int x = left + static_cast<int>(c) * cell_w;
      const int cy = top + static_cast<int>(r) * cell_h;
      svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(cy) + "\" width=\"" +
             std::to_string(cell_w) + "\" height=\"" + std::to_string(cell_h) + "\" fill=\"" +
             detail::heat_color(v) + "\" stroke=\"white\"/>\n";
      svg += "<text class=\"cell-value\" x=\"" + std::to_string(x + cell_w / 2) + "\" y=\"" +
             std::to_string(cy + cell_h / 2 + 5) + "\" font-size=\"13\" text-anchor=\"middle\" fill=\"" +
             (v > 0.55 ? std::string("white") : std::string("black")) + "\">" +
             detail::two_decimals(v) + "</text>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw Error("failed while writing: " + path);
}

}  // namespace concord
