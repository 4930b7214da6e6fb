#include "slope/acquisition.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "slope/error.hpp"
#include "slope/random.hpp"

namespace slope {

namespace {

void check_image(const HadamardOperator& op, const ImagePlane& x) {
  if (x.width() != op.width() || x.height() != op.height()) {
    throw InvalidArgument("image is " + std::to_string(x.width()) + "x" +
                          std::to_string(x.height()) + ", operator expects " +
                          std::to_string(op.width()) + "x" + std::to_string(op.height()));
  }
}

void check_rgb(const std::array<ImagePlane, 3>& channels) {
  if (!channels[0].same_shape(channels[1]) || !channels[0].same_shape(channels[2])) {
    throw InvalidArgument("RGB planes differ in size");
  }
}

}  // namespace

void CalibrationModel::validate() const {
  if (!(g > 0.0 && g <= 1.0)) throw InvalidArgument("calibration g must be in (0, 1]");
  if (!(f >= 0.0)) throw InvalidArgument("calibration f must be non-negative");
  if (f == g) throw DegenerateCalibration("calibration g == f: open and closed states identical");
  if (f > g) throw InvalidArgument("calibration requires f < g");
}

MeasurementMeta make_meta(const HadamardOperator& op) {
  MeasurementMeta meta;
  meta.width = static_cast<std::uint32_t>(op.width());
  meta.height = static_cast<std::uint32_t>(op.height());
  meta.channels = 1;
  meta.count = static_cast<std::uint32_t>(op.measurements());
  meta.seeds = op.seeds();
  return meta;
}

HadamardOperator operator_from_meta(const MeasurementMeta& meta) {
  return build_operator(meta.width, meta.height, meta.count, meta.seeds);
}

MeasurementVector sense_ideal(const HadamardOperator& op, const ImagePlane& x, double noise_sigma,
                              std::uint64_t noise_seed) {
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw InvalidArgument("noise sigma must be finite and non-negative");
  }
  check_image(op, x);
  MeasurementVector out{make_meta(op), op.forward(pad_to_order(x, op.order()))};
  if (noise_sigma > 0.0) {
    Xoshiro256 rng(noise_seed);
    for (double& v : out.values) v += noise_sigma * rng.normal();
  }
  return out;
}

MeasurementVector sense_physical(const HadamardOperator& op, const ImagePlane& x,
                                 const CalibrationModel& cal) {
  cal.validate();
  op.dc_index();
  check_image(op, x);
  const std::vector<double> padded = pad_to_order(x, op.order());
  const double total = std::accumulate(padded.begin(), padded.end(), 0.0);
  std::vector<double> z = op.signed_responses(padded);
  for (double& v : z) {
    const double open = 0.5 * (v + total);  // A+ x
    v = (cal.g - cal.f) * open + cal.f * total;
  }
  MeasurementVector out{make_meta(op), std::move(z)};
  out.meta.raw = true;
  out.meta.calibration = cal;
  return out;
}

MeasurementVector calibrate(const MeasurementVector& z, const CalibrationModel& cal,
                            const HadamardOperator& op) {
  cal.validate();
  const std::size_t dc = op.dc_index();
  if (z.values.size() != op.measurements()) {
    throw InvalidArgument("calibrate: expected " + std::to_string(op.measurements()) +
                          " readings, got " + std::to_string(z.values.size()));
  }
  const double total = z.values[dc] / cal.g;
  MeasurementVector y{z.meta, std::vector<double>(z.values.size())};
  for (std::size_t m = 0; m < z.values.size(); ++m) {
    const double open = (z.values[m] - cal.f * total) / (cal.g - cal.f);
    y.values[m] = op.scale() * (2.0 * open - total);
  }
  y.meta.raw = false;
  y.meta.calibration = CalibrationModel{};
  return y;
}

std::array<MeasurementVector, 3> sense_rgb(const HadamardOperator& op,
                                           const std::array<ImagePlane, 3>& channels,
                                           double noise_sigma, std::uint64_t noise_seed) {
  check_rgb(channels);
  std::array<MeasurementVector, 3> out;
  for (std::size_t c = 0; c < 3; ++c) {
    out[c] = sense_ideal(op, channels[c], noise_sigma, noise_seed + c);
    out[c].meta.channels = 3;
  }
  return out;
}

std::array<MeasurementVector, 3> sense_rgb_physical(const HadamardOperator& op,
                                                    const std::array<ImagePlane, 3>& channels,
                                                    const CalibrationModel& cal) {
  check_rgb(channels);
  std::array<MeasurementVector, 3> out;
  for (std::size_t c = 0; c < 3; ++c) {
    out[c] = sense_physical(op, channels[c], cal);
    out[c].meta.channels = 3;
  }
  return out;
}

}  // namespace slope
