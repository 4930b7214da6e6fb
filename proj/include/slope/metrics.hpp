#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slope/image.hpp"

namespace slope {

struct ChannelQuality {
  double mse = 0.0;
  /// +infinity when mse == 0.
  double psnr_db = 0.0;

  bool infinite() const;
};

/// PSNR with peak 1.0: 10 log10(1 / mse).
struct QualityReport {
  double mse = 0.0;
  double psnr_db = 0.0;
  std::vector<ChannelQuality> channels;

  bool infinite() const;
};

double psnr_from_mse(double mse);

/// `mask`, when given, has one entry per pixel; zero entries are excluded.
QualityReport psnr(const ImagePlane& a, const ImagePlane& b,
                   std::optional<std::span<const std::uint8_t>> mask = std::nullopt);

/// Per-channel breakdown; the aggregate uses the mean of channel MSEs.
QualityReport psnr(std::span<const ImagePlane> a, std::span<const ImagePlane> b);

double l2_distance(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);

}  // namespace slope
