#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "lipc/colour.hpp"
#include "lipc/contact.hpp"
#include "lipc/mixing_model.hpp"

namespace lipc {

/// Per-point contact scalars of a probe g against a function f.
struct CriticalScaleRecord {
  std::size_t index = 0;
  double k_lambda = 1.0;                 ///< upper contact of this point alone
  double k_mu = 1.0;                     ///< lower contact of this point alone
  std::array<double, 3> k_per_channel{};  ///< smallest crossing per channel
};
using CriticalScaleSet = std::vector<CriticalScaleRecord>;

/// Fraction of points each side may discard. Each side independently drops
/// floor(p * #Z) points.
struct ToleranceSpec {
  double discard_fraction = 0.0;

  /// floor(p * n); throws DataError when p is outside [0,1) or the count
  /// would reach n.
  std::size_t discard_count(std::size_t n) const;
};

struct PairDistance {
  double distance = 0.0;
  double lambda = 1.0;  ///< upper probe: lambda (x)c g >= f on Z
  double mu = 1.0;      ///< lower probe: mu (x)c g <= f on Z
  CriticalScaleSet scales;
  ClampStats clamps;
};

struct TolerantPairDistance {
  double distance = 0.0;
  double lambda = 1.0;
  double mu = 1.0;
  std::vector<std::size_t> discarded_low;   ///< points dropped on the upper-probe side
  std::vector<std::size_t> discarded_high;  ///< points dropped on the lower-probe side
  Colour slack_lambda;  ///< realised c_lambda: max_x (f - lambda (x)c g)+ per channel
  Colour slack_mu;      ///< realised c_mu: max_x (mu (x)c g - f)+ per channel
  ClampStats clamps;
};

/// ln(mu/lambda) for a single pair of colours.
double colour_pair_distance(const MixingModel& model, const Colour& c1, const Colour& c2);

/// Spatio-colour distance of f and probe g over Z.
PairDistance image_pair_distance(const MixingModel& model, const ColourImage& f,
                                 const ColourImage& g, std::span<const std::size_t> region);
PairDistance image_pair_distance(const MixingModel& model, const ColourImage& f,
                                 const ColourImage& g);

/// Same, tolerating floor(p * #Z) violating points per side. p = 0 is the
/// exact distance, bit for bit.
TolerantPairDistance image_pair_distance_tol(const MixingModel& model, const ColourImage& f,
                                             const ColourImage& g,
                                             std::span<const std::size_t> region,
                                             const ToleranceSpec& tol);
TolerantPairDistance image_pair_distance_tol(const MixingModel& model, const ColourImage& f,
                                             const ColourImage& g, const ToleranceSpec& tol);

/// Mean of the colour-pair distances over Z.
double pixelwise_d1(const MixingModel& model, const ColourImage& f, const ColourImage& g,
                    std::span<const std::size_t> region);
/// Maximum of the colour-pair distances over Z.
double pixelwise_dinf(const MixingModel& model, const ColourImage& f, const ColourImage& g,
                      std::span<const std::size_t> region);

/// Whether g lies in the epsilon-neighbourhood of f once a fraction p of the
/// points is discarded per side.
bool is_neighbour(const MixingModel& model, const ColourImage& f, const ColourImage& g,
                  double epsilon, double p);

/// min over alpha of max_ch |alpha (x)c c0 - c|. Zero iff c is on the orbit of c0.
double orbit_gap(const MixingModel& model, const Colour& c0, const Colour& c);

/// Contact sets of every point of Z. Shared by the distances and the maps.
std::vector<PointContact> point_contacts(const MixingModel& model, const ColourImage& f,
                                         const ColourImage& g,
                                         std::span<const std::size_t> region,
                                         ClampStats* stats = nullptr);

}  // namespace lipc
