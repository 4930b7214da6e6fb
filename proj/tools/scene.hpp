#pragma once

#include <cstddef>
#include <cstdint>

#include "slope/image.hpp"

namespace slopecam {

/// Deterministic piecewise-smooth test scene in [0, 1]: discs and bars over a
/// shaded background. Used by `demo` when no image is given.
slope::ImagePlane procedural_scene(std::size_t width, std::size_t height, std::uint64_t seed);

}  // namespace slopecam
