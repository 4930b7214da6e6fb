#include "slope/metrics.hpp"

#include <cmath>
#include <limits>

#include "slope/error.hpp"

namespace slope {

bool ChannelQuality::infinite() const { return std::isinf(psnr_db); }
bool QualityReport::infinite() const { return std::isinf(psnr_db); }

double psnr_from_mse(double mse) {
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

QualityReport psnr(const ImagePlane& a, const ImagePlane& b,
                   std::optional<std::span<const std::uint8_t>> mask) {
  if (!a.same_shape(b)) throw InvalidArgument("psnr: image dimensions differ");
  if (mask && mask->size() != a.size()) throw InvalidArgument("psnr: mask size mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (mask && (*mask)[i] == 0) continue;
    const double d = a.data()[i] - b.data()[i];
    sum += d * d;
    ++n;
  }
  if (n == 0) throw InvalidArgument("psnr: mask excludes every pixel");
  QualityReport report;
  report.mse = sum / double(n);
  report.psnr_db = psnr_from_mse(report.mse);
  report.channels.push_back({report.mse, report.psnr_db});
  return report;
}

QualityReport psnr(std::span<const ImagePlane> a, std::span<const ImagePlane> b) {
  if (a.size() != b.size() || a.empty()) throw InvalidArgument("psnr: channel count mismatch");
  QualityReport report;
  double total = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const QualityReport ch = psnr(a[c], b[c]);
    report.channels.push_back(ch.channels.front());
    total += ch.mse;
  }
  report.mse = total / double(a.size());
  report.psnr_db = psnr_from_mse(report.mse);
  return report;
}

double l2_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("l2_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double l2_norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

}  // namespace slope
