#pragma once

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <iterator>
#include <fstream>
#include <string>
#include <vector>

#include "hutchfrac/errors.hpp"
#include "hutchfrac/point.hpp"

namespace hutchfrac {

/// Header `x0,x1,...`, then one point per row with 17 significant digits.
inline std::string cloud_csv(const Cloud& c) {
  std::string out;
  for (std::size_t i = 0; i < c.dim(); ++i) out += (i ? ",x" : "x") + std::to_string(i);
  out += '\n';
  char buf[32];
  for (std::size_t p = 0; p < c.size(); ++p) {
    const auto row = c[p];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

/// Parses cloud_csv output back into a cloud (no deduplication).
inline Cloud parse_cloud_csv(const std::string& text) {
  std::vector<double> flat;
  std::size_t dim = 0, line_no = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line_no++ == 0) {
      dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
      continue;
    }
    if (line.empty()) continue;
    std::size_t start = 0, fields = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      flat.push_back(std::stod(line.substr(start, comma - start)));
      ++fields;
      start = comma + 1;
    }
    if (fields != dim) throw Error("csv row " + std::to_string(line_no) + " has " + std::to_string(fields) + " fields");
  }
  if (dim == 0) throw Error("empty csv");
  return Cloud(dim, std::move(flat));
}

/// Binary P6 raster of the first two coordinates over the box: white
/// background, black occupied bins, row 0 at the top (largest x1). One
/// dimensional clouds are drawn on the middle row.
inline std::string render_ppm(const Cloud& c, const DomainBox& box, std::size_t width, std::size_t height) {
  if (width == 0 || height == 0) throw Error("raster size must be positive");
  require_dim(box.dim(), c.dim(), "render_ppm");
  std::vector<unsigned char> pix(width * height * 3, 255);
  auto bin = [](double v, double lo, double hi, std::size_t n) -> std::size_t {
    if (!(hi > lo)) return n / 2;
    const double u = (v - lo) / (hi - lo);
    const auto b = static_cast<long long>(std::floor(u * static_cast<double>(n)));
    return static_cast<std::size_t>(std::clamp<long long>(b, 0, static_cast<long long>(n) - 1));
  };
  for (std::size_t p = 0; p < c.size(); ++p) {
    const auto x = c[p];
    const std::size_t col = bin(x[0], box.lo()[0], box.hi()[0], width);
    const std::size_t row = c.dim() >= 2 ? height - 1 - bin(x[1], box.lo()[1], box.hi()[1], height) : height / 2;
    unsigned char* px = pix.data() + (row * width + col) * 3;
    px[0] = px[1] = px[2] = 0;
  }
  std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(pix.data()), pix.size());
  return out;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("failed writing '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace hutchfrac
