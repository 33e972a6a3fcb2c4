#include "lipc/lipc_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace lipc {

ColourImage lipc_add(const MixingModel& model, const ColourImage& f, const ColourImage& g,
                     ClampStats* stats) {
  if (!f.same_shape(g)) throw DataError("lipc_add: image dimensions differ");
  ColourImage out(f.width(), f.height());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = model.add(f[i], g[i], stats);
  return out;
}

ColourImage lipc_scalar_mul(const MixingModel& model, double alpha, const ColourImage& f,
                            ClampStats* stats) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("lipc_scalar_mul: alpha must be positive");
  ColourImage out(f.width(), f.height());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = model.scale(alpha, f[i], stats);
  return out;
}

ColourImage white_neutral(const MixingModel& model, std::size_t width, std::size_t height) {
  return ColourImage(width, height, model.white_neutral());
}

ColourImage clamp_gamut(const MixingModel& model, ColourImage img, ClampStats* stats) {
  for (auto& p : img.pixels()) p = model.clamp_gamut(p, stats);
  return img;
}

std::size_t count_transmittance_clamps(const MixingModel& model, const ColourImage& img) {
  ClampStats s;
  for (const auto& p : img.pixels()) (void)model.to_transmittance(p, &s);
  return s.transmittance;
}

}  // namespace lipc
