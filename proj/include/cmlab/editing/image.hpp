#pragma once

#include <string>
#include <vector>

#include "cmlab/core/vec.hpp"

namespace cmlab {

// Row-major (h, w, c) tensor with values nominally in [-1, 1].
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  Vec data;

  Image() = default;
  Image(int h, int w, int c) : height(h), width(w), channels(c), data(size(), 0.0) {}

  std::size_t size() const {
    return static_cast<std::size_t>(height) * width * channels;
  }
  double& at(int i, int j, int k) { return data[(static_cast<std::size_t>(i) * width + j) * channels + k]; }
  double at(int i, int j, int k) const {
    return data[(static_cast<std::size_t>(i) * width + j) * channels + k];
  }
};

// Binary PPM (P6, maxval 255); [-1, 1] maps linearly onto [0, 255]. Single
// images or a row-major tile grid of same-shaped images.
void write_ppm(const std::string& path, const Image& img);
void write_ppm_grid(const std::string& path, const std::vector<Image>& imgs, int per_row);
Image read_ppm(const std::string& path);

}  // namespace cmlab
