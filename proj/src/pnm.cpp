#include "slope/pnm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "slope/error.hpp"

namespace slope {

namespace {

class HeaderReader {
 public:
  HeaderReader(std::span<const std::uint8_t> bytes, std::size_t start) : bytes_(bytes), pos_(start) {}

  std::size_t pos() const { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::uint32_t number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    std::uint64_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 0xFFFFFFFFULL) throw ParseError(start, std::string("pnm: ") + what + " too large");
      ++pos_;
    }
    if (pos_ == start) throw ParseError(start, std::string("pnm: expected ") + what);
    return static_cast<std::uint32_t>(v);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw ParseError(pos_, "pnm: expected whitespace after maxval");
    }
    ++pos_;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Raster decode_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw ParseError(0, "pnm: expected P5 or P6 magic");
  }
  const std::size_t channels = bytes[1] == '5' ? 1 : 3;
  HeaderReader reader(bytes, 2);
  const std::uint32_t width = reader.number("width");
  const std::uint32_t height = reader.number("height");
  reader.skip_space_and_comments();
  const std::size_t maxval_at = reader.pos();
  const std::uint32_t maxval = reader.number("maxval");
  reader.single_space();
  if (width == 0 || height == 0) throw ParseError(2, "pnm: zero image dimension");
  if (maxval == 0 || maxval > 65535) throw ParseError(maxval_at, "pnm: maxval must be 1..65535");

  const std::size_t offset = reader.pos();
  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  const std::size_t pixels = std::size_t(width) * height;
  const std::size_t need = pixels * channels * sample_bytes;
  if (bytes.size() - offset < need) {
    throw ParseError(bytes.size(), "pnm: truncated raster, expected " + std::to_string(need) +
                                       " bytes of samples, found " +
                                       std::to_string(bytes.size() - offset));
  }

  Raster raster;
  raster.maxval = maxval;
  std::vector<std::vector<double>> planes(channels, std::vector<double>(pixels));
  const double scale = 1.0 / double(maxval);
  const std::uint8_t* p = bytes.data() + offset;
  for (std::size_t i = 0; i < pixels; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      std::uint32_t v = 0;
      if (sample_bytes == 2) {
        v = (std::uint32_t(p[0]) << 8) | p[1];
      } else {
        v = p[0];
      }
      if (v > maxval) {
        throw ParseError(std::size_t(p - bytes.data()), "pnm: sample exceeds maxval");
      }
      p += sample_bytes;
      planes[c][i] = double(v) * scale;
    }
  }
  for (auto& plane : planes) raster.planes.emplace_back(width, height, std::move(plane));
  return raster;
}

std::vector<std::uint8_t> encode_pnm(const Raster& raster) {
  const std::size_t channels = raster.planes.size();
  if (channels != 1 && channels != 3) throw InvalidArgument("pnm: need 1 or 3 planes");
  for (const auto& plane : raster.planes) {
    if (!plane.same_shape(raster.planes.front())) throw InvalidArgument("pnm: plane sizes differ");
  }
  if (raster.maxval == 0 || raster.maxval > 65535) throw InvalidArgument("pnm: bad maxval");

  const std::string header = std::string(channels == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(raster.width()) + " " +
                             std::to_string(raster.height()) + "\n" +
                             std::to_string(raster.maxval) + "\n";
  const std::size_t sample_bytes = raster.maxval > 255 ? 2 : 1;
  const std::size_t pixels = raster.width() * raster.height();
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + pixels * channels * sample_bytes);
  for (std::size_t i = 0; i < pixels; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double v = std::clamp(raster.planes[c].data()[i], 0.0, 1.0);
      const auto q = static_cast<std::uint32_t>(std::llround(v * raster.maxval));
      if (sample_bytes == 2) out.push_back(static_cast<std::uint8_t>(q >> 8));
      out.push_back(static_cast<std::uint8_t>(q & 0xFF));
    }
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing " + path.string());
}

Raster read_pnm(const std::filesystem::path& path) { return decode_pnm(read_file(path)); }

void write_pnm(const std::filesystem::path& path, const Raster& raster) {
  write_file(path, encode_pnm(raster));
}

}  // namespace slope
