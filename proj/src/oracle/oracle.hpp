#pragma once

// Brute-force reference implementations. Slow and simple on purpose: every
// answer comes from scanning a dense log-spaced grid of scalars, then
// bisecting the single grid cell where the predicate flips.

#include <cstddef>
#include <span>
#include <vector>

#include "lipc/colour.hpp"
#include "lipc/mixing_model.hpp"
#include "lipc/rng.hpp"

namespace lipc::oracle {

inline constexpr std::size_t kGridSize = 1'000'000;
inline constexpr double kGridMin = 1e-6;
inline constexpr double kGridMax = 1e6;

struct Bounds {
  double lambda = 1.0;
  double mu = 1.0;
  double distance = 0.0;
  bool saturated = false;  ///< an answer sat on the grid boundary
};

/// k-th grid scalar.
double grid_k(std::size_t i);

/// One channel of k (x)c C, unclamped: sum_j A[ch][j] t_j^k.
double orbit_value(const MixingModel& model, const Transmittance& t, std::size_t ch, double k);

/// Smallest k where channel ch of k (x)c probe crosses target.
double critical_scale(const MixingModel& model, const Colour& probe, double target,
                      std::size_t ch);

/// lambda = sup{k : k (x)c g >= f on every point}, mu = inf{k : k (x)c g <= f}.
Bounds pair_distance(const MixingModel& model, std::span<const Colour> f,
                     std::span<const Colour> g);
Bounds colour_distance(const MixingModel& model, const Colour& f, const Colour& g);

/// Tolerant distance by enumerating every set of `discard` points removed on
/// each side independently.
Bounds tolerant_distance_exhaustive(const MixingModel& model, std::span<const Colour> f,
                                    std::span<const Colour> g, std::size_t discard);

/// Marginal grey distance per channel: lambda = inf{k : k(x)g >= f},
/// mu = sup{k : k(x)g <= f}, distance ln(lambda/mu).
Bounds marginal_distance(std::span<const Colour> f, std::span<const Colour> g, double m = 256.0);

// -- Random data that never hits a clamp -----------------------------------

/// Colour whose transmittance lies in [lo, hi]^3 and round-trips without
/// clamping. Rejection-sampled.
Colour random_colour(const MixingModel& model, Rng& rng, double lo = 0.02, double hi = 0.98);
ColourImage random_image(const MixingModel& model, Rng& rng, std::size_t w, std::size_t h,
                         double lo = 0.02, double hi = 0.98);

}  // namespace lipc::oracle
