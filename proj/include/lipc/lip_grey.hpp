#pragma once

#include <cstddef>
#include <span>

#include "lipc/colour.hpp"

namespace lipc::grey {

inline constexpr double kM = 256.0;
inline constexpr double kEps = 1e-3;

/// Clamp a grey tone into [eps, M - eps].
double clamp_tone(double g, double m = kM);

/// k (x) g = M - M (1 - g/M)^k, clamped. Strictly increasing in k.
double lip_scalar_mul(double k, double g, double m = kM);

/// The k with k (x) g = f:  ln(1 - f/M) / ln(1 - g/M).
double grey_critical_scale(double f, double g, double m = kM);

struct MarginalDistance {
  double distance = 0.0;
  double lambda = 1.0;  ///< smallest k with k (x) g >= f on every channel of Z
  double mu = 1.0;      ///< largest k with k (x) g <= f on every channel of Z
};

/// Channel-by-channel Asplund distance ln(lambda / mu) over region Z.
MarginalDistance marginal_asplund_distance(const ColourImage& f, const ColourImage& g,
                                           std::span<const std::size_t> region, double m = kM);
MarginalDistance marginal_asplund_distance(const ColourImage& f, const ColourImage& g,
                                           double m = kM);

}  // namespace lipc::grey
