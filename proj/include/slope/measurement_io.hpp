#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "slope/acquisition.hpp"

namespace slope {

/// SLCI measurement file, little-endian:
///
///   "SLCI" | version u16 | N_x u32 | N_y u32 | channels u8 | M u32 |
///   permutation seed u64 | row-selection seed u64 | calibration flag u8 |
///   g f64 | f f64 | channels x M f64 values
///
/// The calibration flag is 1 for raw physical readings (still to be
/// calibrated with g, f) and 0 for ideal measurements. Physical files must be
/// acquired with the all-open Hadamard row 0 selected, which build_operator
/// always includes.
inline constexpr std::uint16_t kMeasurementFormatVersion = 1;
inline constexpr std::size_t kMeasurementHeaderBytes = 4 + 2 + 4 + 4 + 1 + 4 + 8 + 8 + 1 + 8 + 8;

/// All channels must share one meta (apart from `channels`, which is set to the count).
std::vector<std::uint8_t> encode_measurements(std::span<const MeasurementVector> channels);
std::vector<MeasurementVector> decode_measurements(std::span<const std::uint8_t> bytes);

void write_measurements(const std::filesystem::path& path,
                        std::span<const MeasurementVector> channels);
std::vector<MeasurementVector> read_measurements(const std::filesystem::path& path);

}  // namespace slope
