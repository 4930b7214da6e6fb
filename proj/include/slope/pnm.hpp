#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "slope/image.hpp"

namespace slope {

/// Binary netpbm raster (P5 grayscale or P6 color), 8- or 16-bit.
/// Samples are stored as value / maxval; writing rounds back to integers, so
/// read-then-write reproduces a canonically formatted file byte for byte.
struct Raster {
  std::uint32_t maxval = 255;
  std::vector<ImagePlane> planes;  // 1 (gray) or 3 (R, G, B)

  std::size_t width() const { return planes.empty() ? 0 : planes.front().width(); }
  std::size_t height() const { return planes.empty() ? 0 : planes.front().height(); }
};

/// Throws ParseError (with byte offset) on malformed or truncated input.
Raster decode_pnm(std::span<const std::uint8_t> bytes);
/// Values are clamped to [0, 1] before quantization.
std::vector<std::uint8_t> encode_pnm(const Raster& raster);

Raster read_pnm(const std::filesystem::path& path);
void write_pnm(const std::filesystem::path& path, const Raster& raster);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace slope
