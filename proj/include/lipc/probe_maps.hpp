#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "lipc/asplund.hpp"
#include "lipc/colour.hpp"
#include "lipc/mixing_model.hpp"

namespace lipc {

struct Rect {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t width = 0;
  std::size_t height = 0;

  bool contains(std::size_t px, std::size_t py) const {
    return px >= x && py >= y && px < x + width && py < y + height;
  }
  bool empty() const { return width == 0 || height == 0; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Template t on D_t with the offset of its reference pixel.
struct Probe {
  ColourImage image;
  std::size_t anchor_x = 0;
  std::size_t anchor_y = 0;

  /// Anchor at the geometric centre, rounded down for even sizes.
  static Probe centred(ColourImage image);
};

/// Scalar field over the target image. Positions outside valid_rect, where the
/// probe window does not fit, hold the NaN sentinel.
class DistanceMap {
 public:
  static constexpr double kSentinel = std::numeric_limits<double>::quiet_NaN();

  DistanceMap() = default;
  DistanceMap(std::size_t width, std::size_t height, Rect valid);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  const Rect& valid_rect() const { return valid_; }
  bool is_valid(std::size_t x, std::size_t y) const { return valid_.contains(x, y); }

  double& at(std::size_t x, std::size_t y) { return values_[y * width_ + x]; }
  double at(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // Provenance carried into the sidecar header.
  std::size_t probe_width = 0;
  std::size_t probe_height = 0;
  std::size_t anchor_x = 0;
  std::size_t anchor_y = 0;
  double tolerance_p = 0.0;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  Rect valid_;
  std::vector<double> values_;
};

/// Rectangle of positions where the whole probe window fits inside an
/// image of the given size. Throws DataError if the probe does not fit.
Rect valid_rect_for(std::size_t width, std::size_t height, const Probe& probe);

struct MapOptions {
  std::size_t threads = 1;
};

/// Asplund distance between the probe and the window of f at every position.
DistanceMap asplund_map(const MixingModel& model, const ColourImage& f, const Probe& probe,
                        const MapOptions& opts = {});
/// Same with floor(p * #D_t) points discarded per side in each window.
DistanceMap asplund_map_tol(const MixingModel& model, const ColourImage& f, const Probe& probe,
                            const ToleranceSpec& tol, const MapOptions& opts = {});

/// Fills `area` (clipped to the valid rect) of an existing map. Tiles computed
/// separately agree exactly with a single full pass.
void fill_asplund_map(const MixingModel& model, const ColourImage& f, const Probe& probe,
                      const ToleranceSpec& tol, const Rect& area, DistanceMap& map,
                      const MapOptions& opts = {});

struct CorrelationMap {
  DistanceMap field;               ///< mean-over-channels ZNCC in [-1, 1]
  std::size_t zero_variance = 0;   ///< channel windows with zero variance (scored 0)
};

/// Zero-normalised cross-correlation baseline.
CorrelationMap correlation_map(const ColourImage& f, const Probe& probe,
                               const MapOptions& opts = {});

struct Match {
  std::size_t x = 0;
  std::size_t y = 0;
  double value = 0.0;
  std::size_t rank = 0;  ///< 1-based
};

struct MatchSet {
  std::vector<Match> matches;
  std::size_t radius = 0;
  double threshold = 0.0;
  double tolerance_p = 0.0;
};

/// Regional minima: positions whose value is <= every value in the
/// (2r+1)^2 window, strictly below at least one of them, and lexicographically
/// first (y, x) among equal values. Keeps those <= threshold, ascending,
/// truncated to max_count.
MatchSet extract_minima(const DistanceMap& map, std::size_t radius, std::size_t max_count,
                        double threshold);

/// Copy with every valid value negated (turns maxima into minima).
DistanceMap negated(const DistanceMap& map);

// -- Serialisation ---------------------------------------------------------

/// Writes <prefix>.f64 (little-endian doubles, row-major, NaN sentinel),
/// <prefix>.json (header) and, when preview is set, <prefix>.pgm (16-bit,
/// valid rect scaled to [0, 65535], scale stored in the header).
void write_map(const DistanceMap& map, const std::filesystem::path& prefix, bool preview);
DistanceMap read_map(const std::filesystem::path& prefix);

}  // namespace lipc
