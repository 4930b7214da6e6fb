#include "scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slope/random.hpp"

namespace slopecam {

slope::ImagePlane procedural_scene(std::size_t width, std::size_t height, std::uint64_t seed) {
  slope::ImagePlane img(width, height);
  slope::Xoshiro256 rng(seed);
  const double w = double(width);
  const double h = double(height);

  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      img(r, c) = 0.25 + 0.35 * double(r) / h + 0.15 * double(c) / w;
    }
  }
  for (int d = 0; d < 6; ++d) {
    const double cy = rng.uniform() * h;
    const double cx = rng.uniform() * w;
    const double rad = (0.06 + 0.14 * rng.uniform()) * std::min(w, h);
    const double level = rng.uniform();
    for (std::size_t r = 0; r < height; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        const double dist = std::hypot(double(r) - cy, double(c) - cx);
        if (dist < rad) img(r, c) = 0.6 * level + 0.4 * img(r, c) * (1.0 - dist / rad);
      }
    }
  }
  for (int b = 0; b < 3; ++b) {
    const auto r0 = static_cast<std::size_t>(rng.uniform() * h * 0.8);
    const auto c0 = static_cast<std::size_t>(rng.uniform() * w * 0.8);
    const std::size_t bh = 2 + static_cast<std::size_t>(rng.uniform() * h * 0.2);
    const std::size_t bw = 2 + static_cast<std::size_t>(rng.uniform() * w * 0.2);
    const double level = rng.uniform();
    for (std::size_t r = r0; r < std::min(height, r0 + bh); ++r) {
      for (std::size_t c = c0; c < std::min(width, c0 + bw); ++c) img(r, c) = level;
    }
  }
  const double period = std::max(4.0, w / 10.0);
  for (std::size_t r = height / 2; r < height / 2 + height / 8; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      img(r, c) = 0.5 + 0.3 * std::sin(2.0 * std::numbers::pi * double(c) / period);
    }
  }
  for (double& v : img.data()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

}  // namespace slopecam
