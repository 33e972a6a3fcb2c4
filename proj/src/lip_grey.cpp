#include "lipc/lip_grey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lipc::grey {

double clamp_tone(double g, double m) {
  if (std::isnan(g)) return kEps;
  return std::clamp(g, kEps, m - kEps);
}

double lip_scalar_mul(double k, double g, double m) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw std::invalid_argument("lip_scalar_mul: k must be positive");
  g = clamp_tone(g, m);
  return clamp_tone(m - m * std::pow(1.0 - g / m, k), m);
}

double grey_critical_scale(double f, double g, double m) {
  f = clamp_tone(f, m);
  g = clamp_tone(g, m);
  if (f == g) return 1.0;
  return std::log1p(-f / m) / std::log1p(-g / m);
}

MarginalDistance marginal_asplund_distance(const ColourImage& f, const ColourImage& g,
                                           std::span<const std::size_t> region, double m) {
  if (!f.same_shape(g)) throw DataError("marginal_asplund_distance: image dimensions differ");
  if (region.empty()) throw DataError("marginal_asplund_distance: empty region");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t idx : region) {
    if (idx >= f.size()) throw DataError("marginal_asplund_distance: region index out of range");
    for (std::size_t c = 0; c < 3; ++c) {
      const double k = grey_critical_scale(f[idx][c], g[idx][c], m);
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
  }
  return {std::log(hi / lo), hi, lo};
}

MarginalDistance marginal_asplund_distance(const ColourImage& f, const ColourImage& g, double m) {
  const auto z = full_region(f);
  return marginal_asplund_distance(f, g, z, m);
}

}  // namespace lipc::grey
