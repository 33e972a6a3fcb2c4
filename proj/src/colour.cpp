#include "lipc/colour.hpp"

#include <numeric>

namespace lipc {

ColourImage ColourImage::crop(std::size_t x, std::size_t y, std::size_t w, std::size_t h) const {
  if (w == 0 || h == 0 || x + w > width_ || y + h > height_)
    throw DataError("crop rectangle outside image");
  std::vector<Colour> out;
  out.reserve(w * h);
  for (std::size_t yy = y; yy < y + h; ++yy)
    for (std::size_t xx = x; xx < x + w; ++xx) out.push_back(at(xx, yy));
  return ColourImage(w, h, std::move(out));
}

std::vector<std::size_t> full_region(const ColourImage& img) {
  std::vector<std::size_t> z(img.size());
  std::iota(z.begin(), z.end(), std::size_t{0});
  return z;
}

}  // namespace lipc
