#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace slope {

/// One channel of intensities, row-major, nominally in [0, 1].
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(std::size_t width, std::size_t height, double fill = 0.0);
  /// Throws InvalidArgument if `values.size() != width * height` or any value is non-finite.
  ImagePlane(std::size_t width, std::size_t height, std::vector<double> values);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(std::size_t row, std::size_t col) { return values_[row * width_ + col]; }
  double operator()(std::size_t row, std::size_t col) const { return values_[row * width_ + col]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& data() noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }

  bool same_shape(const ImagePlane& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> values_;
};

/// Copies the plane into a zero-filled vector of length `order` (pixel i at index i).
std::vector<double> pad_to_order(const ImagePlane& image, std::size_t order);

/// Inverse of pad_to_order: takes the first width*height entries.
ImagePlane crop_from_order(std::span<const double> padded, std::size_t width, std::size_t height);

}  // namespace slope
