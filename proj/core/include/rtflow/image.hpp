#pragma once

#include <cstddef>
#include <vector>

namespace rtflow {

/// Row-major grayscale image, x fastest.
struct Image {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> data;

  Image() = default;
  Image(std::size_t width, std::size_t height, double fill = 0.0)
      : nx(width), ny(height), data(width * height, fill) {}

  std::size_t size() const { return data.size(); }
  double& at(std::size_t x, std::size_t y) { return data[y * nx + x]; }
  double at(std::size_t x, std::size_t y) const { return data[y * nx + x]; }
};

/// Counter-clockwise quarter turn about the grid center: out(n-1-y, x) = in(x, y).
/// Requires a square image.
Image rotate_quarter_turn(const Image& f);

}  // namespace rtflow
