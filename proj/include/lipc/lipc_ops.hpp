#pragma once

#include "lipc/colour.hpp"
#include "lipc/mixing_model.hpp"

namespace lipc {

/// Pixelwise F (+)c G. Throws DataError on shape mismatch.
ColourImage lipc_add(const MixingModel& model, const ColourImage& f, const ColourImage& g,
                     ClampStats* stats = nullptr);

/// Pixelwise alpha (x)c F. alpha in (0,1) brightens, alpha > 1 darkens.
/// Throws std::invalid_argument for alpha <= 0.
ColourImage lipc_scalar_mul(const MixingModel& model, double alpha, const ColourImage& f,
                            ClampStats* stats = nullptr);

/// W x H image filled with the neutral element.
ColourImage white_neutral(const MixingModel& model, std::size_t width, std::size_t height);

/// Clamp every pixel into the model gamut.
ColourImage clamp_gamut(const MixingModel& model, ColourImage img, ClampStats* stats = nullptr);

/// Number of pixels whose transmittance clamps.
std::size_t count_transmittance_clamps(const MixingModel& model, const ColourImage& img);

}  // namespace lipc
