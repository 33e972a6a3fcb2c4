#pragma once

#include <filesystem>

#include "lipc/colour.hpp"
#include "lipc/mixing_model.hpp"

namespace lipc {

/// Reads an 8-bit RGB PNG or binary PPM (P6, maxval 255). Byte v maps to
/// intensity v, then clamps into the model gamut. Format is sniffed from the
/// file signature. Throws DataError on anything else.
ColourImage load_image(const std::filesystem::path& path,
                       const MixingModel& model = make_mixing_model());

/// Writes 8-bit RGB, format by extension (.png, otherwise PPM). Intensities
/// are rounded to the nearest byte.
void save_image(const ColourImage& img, const std::filesystem::path& path);

ColourImage read_ppm(const std::filesystem::path& path, const MixingModel& model);
void write_ppm(const ColourImage& img, const std::filesystem::path& path);
ColourImage read_png(const std::filesystem::path& path, const MixingModel& model);
void write_png(const ColourImage& img, const std::filesystem::path& path);

/// Round-to-nearest byte of an intensity.
unsigned char to_byte(double v);

}  // namespace lipc
