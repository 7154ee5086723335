#include "rtflow/image.hpp"

#include "rtflow/errors.hpp"

namespace rtflow {

Image rotate_quarter_turn(const Image& f) {
  if (f.nx != f.ny) throw ConfigError("quarter turn needs a square image");
  const std::size_t n = f.nx;
  Image out(n, n);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) out.at(n - 1 - y, x) = f.at(x, y);
  return out;
}

}  // namespace rtflow
