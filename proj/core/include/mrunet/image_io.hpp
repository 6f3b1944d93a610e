#pragma once

#include <cstdint>
#include <filesystem>

#include "mrunet/raster.hpp"

namespace mrunet {

/// Decodes PNG or binary/ASCII PGM/PPM into an 8-bit raster. Sources with more
/// than 8 bits are mapped linearly onto 0..255 with round-half-up (65535 -> 255).
/// Alpha channels are dropped and palettes expanded. Throws FormatError for
/// unsupported or corrupt files and IoError when the file cannot be opened.
Raster load_raster(const std::filesystem::path& path);

/// Writes an 8-bit grayscale or RGB PNG.
void save_png(const Raster& raster, const std::filesystem::path& path);

/// Writes binary PGM (1 channel) or PPM (3 channels) with maxval 255.
void save_pnm(const Raster& raster, const std::filesystem::path& path);

/// Round-half-up mapping of a sample in [0, maxval] onto [0, 255].
std::uint8_t rescale_to_8bit(std::uint32_t value, std::uint32_t maxval);

} // namespace mrunet
