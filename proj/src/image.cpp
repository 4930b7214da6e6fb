#include "slope/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slope/error.hpp"

namespace slope {

ImagePlane::ImagePlane(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), values_(width * height, fill) {}

ImagePlane::ImagePlane(std::size_t width, std::size_t height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (values_.size() != width_ * height_) {
    throw InvalidArgument("image plane: expected " + std::to_string(width_ * height_) +
                          " values, got " + std::to_string(values_.size()));
  }
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidArgument("image plane: non-finite pixel value");
  }
}

std::vector<double> pad_to_order(const ImagePlane& image, std::size_t order) {
  if (image.size() > order) {
    throw InvalidArgument("image has " + std::to_string(image.size()) +
                          " pixels, more than operator order " + std::to_string(order));
  }
  std::vector<double> padded(order, 0.0);
  std::copy(image.data().begin(), image.data().end(), padded.begin());
  return padded;
}

ImagePlane crop_from_order(std::span<const double> padded, std::size_t width, std::size_t height) {
  if (padded.size() < width * height) {
    throw InvalidArgument("padded vector shorter than image");
  }
  return ImagePlane(width, height,
                    std::vector<double>(padded.begin(), padded.begin() + width * height));
}

}  // namespace slope
