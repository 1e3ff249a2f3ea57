#pragma once

#include <filesystem>

#include "glyphforge/imaging/raster.hpp"

namespace glyphforge::imaging {

// 8-bit PNG I/O. Any PNG colour type is accepted on read; alpha is composed
// onto white. Intensity = byte / 255.
RgbRaster read_png_rgb(const std::filesystem::path& path);

// read_png_rgb followed by to_grayscale.
GrayRaster read_png_gray(const std::filesystem::path& path);

// Writes an 8-bit grayscale PNG, byte = round(255 * intensity).
void write_png(const GrayRaster& image, const std::filesystem::path& path);

}  // namespace glyphforge::imaging
