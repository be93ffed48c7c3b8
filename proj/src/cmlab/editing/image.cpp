#include "cmlab/editing/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "cmlab/core/errors.hpp"

namespace cmlab {

namespace {

std::uint8_t to_byte(double v) {
  const double scaled = (v + 1.0) * 0.5 * 255.0;
  return static_cast<std::uint8_t>(std::lround(std::clamp(scaled, 0.0, 255.0)));
}

void write_p6(std::ofstream& os, int w, int h, const std::vector<std::uint8_t>& rgb) {
  os << "P6\n" << w << " " << h << "\n255\n";
  os.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
}

std::vector<std::uint8_t> to_rgb(const Image& img) {
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(img.height) * img.width * 3);
  std::size_t o = 0;
  for (int i = 0; i < img.height; ++i) {
    for (int j = 0; j < img.width; ++j) {
      for (int k = 0; k < 3; ++k) {
        const int c = img.channels == 1 ? 0 : k;
        rgb[o++] = to_byte(img.at(i, j, c));
      }
    }
  }
  return rgb;
}

}  // namespace

void write_ppm(const std::string& path, const Image& img) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw input_error("write_ppm: cannot open " + path);
  write_p6(os, img.width, img.height, to_rgb(img));
}

void write_ppm_grid(const std::string& path, const std::vector<Image>& imgs, int per_row) {
  if (imgs.empty()) throw input_error("write_ppm_grid: empty image list");
  const int h = imgs[0].height;
  const int w = imgs[0].width;
  const int cols = std::min<int>(per_row, static_cast<int>(imgs.size()));
  const int rows = (static_cast<int>(imgs.size()) + cols - 1) / cols;

  Image grid(rows * h, cols * w, 3);
  for (std::size_t m = 0; m < imgs.size(); ++m) {
    const int r0 = static_cast<int>(m) / cols * h;
    const int c0 = static_cast<int>(m) % cols * w;
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) {
        for (int k = 0; k < 3; ++k) {
          const int c = imgs[m].channels == 1 ? 0 : k;
          grid.at(r0 + i, c0 + j, k) = imgs[m].at(i, j, c);
        }
      }
    }
  }
  write_ppm(path, grid);
}

Image read_ppm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw input_error("read_ppm: cannot open " + path);
  std::string magic;
  is >> magic;
  if (magic != "P6") throw input_error("read_ppm: unsupported format " + magic);

  auto next_int = [&]() {
    // Skip whitespace and '#' comment lines.
    int c = is.get();
    while (c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '#') {
      if (c == '#') {
        while (c != '\n' && c != EOF) c = is.get();
      }
      c = is.get();
    }
    int v = 0;
    while (c >= '0' && c <= '9') {
      v = v * 10 + (c - '0');
      c = is.get();
    }
    return v;
  };

  const int w = next_int();
  const int h = next_int();
  const int maxval = next_int();
  if (w <= 0 || h <= 0 || maxval != 255) throw input_error("read_ppm: bad header");

  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
  is.read(reinterpret_cast<char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
  if (!is) throw input_error("read_ppm: truncated pixel data");

  Image img(h, w, 3);
  for (std::size_t i = 0; i < rgb.size(); ++i)
    img.data[i] = static_cast<double>(rgb[i]) / 255.0 * 2.0 - 1.0;
  return img;
}

}  // namespace cmlab
