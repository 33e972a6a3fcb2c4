#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "lipc/errors.hpp"

namespace lipc {

enum class Channel : std::size_t { R = 0, G = 1, B = 2 };

inline constexpr std::array<Channel, 3> kChannels{Channel::R, Channel::G, Channel::B};

/// Three real intensities in gamut space [0, M).
struct Colour {
  std::array<double, 3> v{};

  constexpr double& operator[](std::size_t i) { return v[i]; }
  constexpr double operator[](std::size_t i) const { return v[i]; }
  constexpr double& operator[](Channel c) { return v[static_cast<std::size_t>(c)]; }
  constexpr double operator[](Channel c) const { return v[static_cast<std::size_t>(c)]; }

  friend constexpr bool operator==(const Colour&, const Colour&) = default;
};

/// Per-channel transmittance, clamped inside (0, 1). 1 is transparent (bright).
struct Transmittance {
  std::array<double, 3> v{};

  constexpr double& operator[](std::size_t i) { return v[i]; }
  constexpr double operator[](std::size_t i) const { return v[i]; }

  friend constexpr bool operator==(const Transmittance&, const Transmittance&) = default;
};

/// Counts clamping events. Callers own it; functions only increment.
struct ClampStats {
  std::size_t transmittance = 0;  ///< pixels whose U^-1 K c left (eps_t, 1 - eps_t)
  std::size_t gamut = 0;          ///< pixels whose K^-1 U t left the gamut
  std::size_t out_of_range = 0;   ///< contact targets outside the range of the scaling curve

  ClampStats& operator+=(const ClampStats& o) {
    transmittance += o.transmittance;
    gamut += o.gamut;
    out_of_range += o.out_of_range;
    return *this;
  }
};

/// Row-major W x H grid of colours.
class ColourImage {
 public:
  ColourImage() = default;
  ColourImage(std::size_t width, std::size_t height, Colour fill = {})
      : width_(width), height_(height), pixels_(width * height, fill) {
    if (width == 0 || height == 0) throw DataError("ColourImage: empty dimensions");
  }
  ColourImage(std::size_t width, std::size_t height, std::vector<Colour> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width == 0 || height == 0) throw DataError("ColourImage: empty dimensions");
    if (pixels_.size() != width * height)
      throw DataError("ColourImage: pixel count does not match width*height");
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  Colour& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }
  const Colour& at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
  Colour& operator[](std::size_t i) { return pixels_[i]; }
  const Colour& operator[](std::size_t i) const { return pixels_[i]; }

  std::vector<Colour>& pixels() { return pixels_; }
  const std::vector<Colour>& pixels() const { return pixels_; }

  bool same_shape(const ColourImage& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

  /// Sub-image [x, x+w) x [y, y+h).
  ColourImage crop(std::size_t x, std::size_t y, std::size_t w, std::size_t h) const;

  friend bool operator==(const ColourImage&, const ColourImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<Colour> pixels_;
};

/// Linear indices 0..n-1, the whole domain.
std::vector<std::size_t> full_region(const ColourImage& img);

}  // namespace lipc
