#include "slope/measurement_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string>

#include "slope/error.hpp"
#include "slope/pnm.hpp"

namespace slope {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (bytes_.size() - pos_ < sizeof(T)) {
      throw FormatError(FormatError::Kind::Truncated,
                        "measurement file truncated at byte " + std::to_string(pos_));
    }
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_measurements(std::span<const MeasurementVector> channels) {
  if (channels.empty() || channels.size() > 255) {
    throw InvalidArgument("measurement file needs 1..255 channels");
  }
  MeasurementMeta meta = channels.front().meta;
  meta.channels = static_cast<std::uint8_t>(channels.size());
  for (const auto& ch : channels) {
    MeasurementMeta other = ch.meta;
    other.channels = meta.channels;
    if (!(other == meta)) throw InvalidArgument("channels disagree on measurement metadata");
    if (ch.values.size() != meta.count) {
      throw InvalidArgument("channel has " + std::to_string(ch.values.size()) +
                            " values, header says " + std::to_string(meta.count));
    }
  }

  std::vector<std::uint8_t> out{'S', 'L', 'C', 'I'};
  out.reserve(kMeasurementHeaderBytes + channels.size() * meta.count * 8);
  put<std::uint16_t>(out, kMeasurementFormatVersion);
  put<std::uint32_t>(out, meta.width);
  put<std::uint32_t>(out, meta.height);
  put<std::uint8_t>(out, meta.channels);
  put<std::uint32_t>(out, meta.count);
  put<std::uint64_t>(out, meta.seeds.permutation);
  put<std::uint64_t>(out, meta.seeds.rows);
  put<std::uint8_t>(out, meta.raw ? 1 : 0);
  put<double>(out, meta.calibration.g);
  put<double>(out, meta.calibration.f);
  for (const auto& ch : channels) {
    for (double v : ch.values) put<double>(out, v);
  }
  return out;
}

std::vector<MeasurementVector> decode_measurements(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "SLCI", 4) != 0) {
    throw FormatError(FormatError::Kind::BadMagic, "not an SLCI measurement file (bad magic)");
  }
  Cursor cur(bytes.subspan(4));
  const auto version = cur.get<std::uint16_t>();
  if (version != kMeasurementFormatVersion) {
    throw FormatError(FormatError::Kind::UnsupportedVersion,
                      "unsupported SLCI version " + std::to_string(version));
  }
  MeasurementMeta meta;
  meta.width = cur.get<std::uint32_t>();
  meta.height = cur.get<std::uint32_t>();
  meta.channels = cur.get<std::uint8_t>();
  meta.count = cur.get<std::uint32_t>();
  meta.seeds.permutation = cur.get<std::uint64_t>();
  meta.seeds.rows = cur.get<std::uint64_t>();
  const auto flag = cur.get<std::uint8_t>();
  meta.calibration.g = cur.get<double>();
  meta.calibration.f = cur.get<double>();
  if (flag > 1) throw FormatError(FormatError::Kind::Inconsistent, "calibration flag must be 0 or 1");
  meta.raw = flag == 1;
  if (meta.width == 0 || meta.height == 0 || meta.channels == 0 || meta.count == 0) {
    throw FormatError(FormatError::Kind::Inconsistent, "zero dimension in SLCI header");
  }

  const std::size_t expected = std::size_t(meta.channels) * meta.count * sizeof(double);
  if (cur.remaining() != expected) {
    throw FormatError(FormatError::Kind::SizeMismatch,
                      "SLCI payload is " + std::to_string(cur.remaining()) +
                          " bytes, header implies " + std::to_string(expected));
  }
  std::vector<MeasurementVector> out(meta.channels);
  for (auto& ch : out) {
    ch.meta = meta;
    ch.values.resize(meta.count);
    for (double& v : ch.values) v = cur.get<double>();
  }
  return out;
}

void write_measurements(const std::filesystem::path& path,
                        std::span<const MeasurementVector> channels) {
  write_file(path, encode_measurements(channels));
}

std::vector<MeasurementVector> read_measurements(const std::filesystem::path& path) {
  return decode_measurements(read_file(path));
}

}  // namespace slope
