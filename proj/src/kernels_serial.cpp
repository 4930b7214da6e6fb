#include <algorithm>
#include <vector>

#include "slope/kernels.hpp"

namespace slope::kernels::serial {

void fwht(std::span<double> v) {
  const std::size_t n = v.size();
  for (std::size_t h = 1; h < n; h *= 2) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j];
        const double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

void extract_patches(const PatchGrid& grid, std::span<const double> image, std::span<double> out) {
  const std::size_t q = grid.patch_size();
  std::size_t p = 0;
  for (std::size_t r0 : grid.rows) {
    for (std::size_t c0 : grid.cols) {
      double* dst = out.data() + p * q;
      for (std::size_t r = 0; r < grid.edge; ++r) {
        for (std::size_t c = 0; c < grid.edge; ++c) {
          dst[r * grid.edge + c] = image[(r0 + r) * grid.width + c0 + c];
        }
      }
      ++p;
    }
  }
}

void average_patches(const PatchGrid& grid, std::span<const double> patches, std::span<double> out) {
  const std::size_t q = grid.patch_size();
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<std::uint32_t> seen(out.size(), 0);
  std::size_t p = 0;
  for (std::size_t r0 : grid.rows) {
    for (std::size_t c0 : grid.cols) {
      const double* src = patches.data() + p * q;
      for (std::size_t r = 0; r < grid.edge; ++r) {
        for (std::size_t c = 0; c < grid.edge; ++c) {
          const std::size_t idx = (r0 + r) * grid.width + c0 + c;
          detail::running_mean(out[idx], src[r * grid.edge + c], ++seen[idx]);
        }
      }
      ++p;
    }
  }
}

void transform_patches(std::span<double> patches, std::size_t edge, std::span<const double> basis,
                       bool inverse) {
  const std::size_t q = edge * edge;
  std::vector<double> scratch(q);
  for (std::size_t off = 0; off < patches.size(); off += q) {
    detail::transform_one(patches.data() + off, scratch.data(), edge, basis.data(), inverse);
  }
}

void assign_nearest(std::span<const double> points, std::size_t dim,
                    std::span<const double> centroids, std::span<std::uint32_t> labels,
                    std::span<double> distances) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    detail::nearest_one(points.data() + i * dim, dim, centroids, labels[i], distances[i]);
  }
}

}  // namespace slope::kernels::serial
