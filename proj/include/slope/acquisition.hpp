#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "slope/hadamard.hpp"
#include "slope/image.hpp"

namespace slope {

/// Aperture transmittance: `g` when an element is open, `f` (leakage) when closed.
struct CalibrationModel {
  double g = 1.0;
  double f = 0.0;

  /// Requires 0 <= f < g <= 1. g == f throws DegenerateCalibration.
  void validate() const;
};

struct MeasurementMeta {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint8_t channels = 1;
  std::uint32_t count = 0;  // M
  OperatorSeeds seeds;
  /// True for raw physical readings that still need calibrate().
  bool raw = false;
  CalibrationModel calibration;

  double csr() const { return static_cast<double>(count) / (double(width) * double(height)); }
  friend bool operator==(const MeasurementMeta& a, const MeasurementMeta& b) {
    return a.width == b.width && a.height == b.height && a.channels == b.channels &&
           a.count == b.count && a.seeds == b.seeds && a.raw == b.raw &&
           a.calibration.g == b.calibration.g && a.calibration.f == b.calibration.f;
  }
};

/// One channel of measurements y (or raw readings z) plus what is needed to
/// rebuild the operator that produced them.
struct MeasurementVector {
  MeasurementMeta meta;
  std::vector<double> values;
};

MeasurementMeta make_meta(const HadamardOperator& op);

/// Rebuilds the sensing operator described by `meta`.
HadamardOperator operator_from_meta(const MeasurementMeta& meta);

/// y = A x + n, n ~ N(0, noise_sigma^2) i.i.d. from Xoshiro256(noise_seed).
MeasurementVector sense_ideal(const HadamardOperator& op, const ImagePlane& x, double noise_sigma = 0.0,
                              std::uint64_t noise_seed = 0);

/// Raw sensor readings with {0,1} patterns and transmittances (g, f):
/// z_m = (g - f) * A+_m x + f * sum(x), A+ = (A0 + 1) / 2.
MeasurementVector sense_physical(const HadamardOperator& op, const ImagePlane& x,
                                 const CalibrationModel& cal);

/// Converts raw readings back to orthonormal +-1 measurements. The all-open
/// row supplies sum(x) = z_0 / g.
MeasurementVector calibrate(const MeasurementVector& z, const CalibrationModel& cal,
                            const HadamardOperator& op);

/// Per-channel sense_ideal with the shared operator; channel c draws its
/// noise from seed noise_seed + c.
std::array<MeasurementVector, 3> sense_rgb(const HadamardOperator& op,
                                           const std::array<ImagePlane, 3>& channels,
                                           double noise_sigma = 0.0, std::uint64_t noise_seed = 0);

std::array<MeasurementVector, 3> sense_rgb_physical(const HadamardOperator& op,
                                                    const std::array<ImagePlane, 3>& channels,
                                                    const CalibrationModel& cal);

}  // namespace slope
