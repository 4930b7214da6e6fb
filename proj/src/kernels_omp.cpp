#include <algorithm>
#include <cstdint>
#include <vector>

#include <omp.h>

#include "slope/kernels.hpp"

namespace slope::kernels::parallel {

namespace {

// Transforms shorter than this run serially; fork/join would dominate.
constexpr std::size_t kFwhtParallelLength = std::size_t(1) << 14;
// Stages with h below this stay inside one cache-sized block.
constexpr std::size_t kFwhtBlock = std::size_t(1) << 12;

bool single_thread() { return omp_get_max_threads() == 1; }

// For each coordinate t in [0, extent), the half-open range of patch
// positions whose span [pos, pos + edge) contains t.
void cover_ranges(std::span<const std::size_t> positions, std::size_t extent, std::size_t edge,
                  std::vector<std::size_t>& lo, std::vector<std::size_t>& hi) {
  lo.assign(extent, 0);
  hi.assign(extent, 0);
  std::size_t first = 0;
  for (std::size_t t = 0; t < extent; ++t) {
    while (first < positions.size() && positions[first] + edge <= t) ++first;
    std::size_t last = first;
    while (last < positions.size() && positions[last] <= t) ++last;
    lo[t] = first;
    hi[t] = last;
  }
}

}  // namespace

void fwht(std::span<double> v) {
  const std::size_t n = v.size();
  if (n < kFwhtParallelLength || single_thread()) {
    serial::fwht(v);
    return;
  }
  // Stages h < kFwhtBlock never mix aligned blocks, so each block runs them
  // on its own; the remaining stages are split across butterflies.
  const auto blocks = static_cast<std::int64_t>(n / kFwhtBlock);
  double* data = v.data();
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < blocks; ++b) {
      serial::fwht({data + static_cast<std::size_t>(b) * kFwhtBlock, kFwhtBlock});
    }
    for (std::size_t h = kFwhtBlock; h < n; h *= 2) {
      const auto half = static_cast<std::int64_t>(n / 2);
#pragma omp for schedule(static)
      for (std::int64_t t = 0; t < half; ++t) {
        const std::size_t i = static_cast<std::size_t>(t);
        const std::size_t j = (i / h) * 2 * h + i % h;
        const double a = data[j];
        const double c = data[j + h];
        data[j] = a + c;
        data[j + h] = a - c;
      }
    }
  }
}

void extract_patches(const PatchGrid& grid, std::span<const double> image, std::span<double> out) {
  const std::size_t q = grid.patch_size();
  const std::size_t ncols = grid.cols.size();
  const auto count = static_cast<std::int64_t>(grid.patch_count());
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < count; ++p) {
    const std::size_t r0 = grid.rows[static_cast<std::size_t>(p) / ncols];
    const std::size_t c0 = grid.cols[static_cast<std::size_t>(p) % ncols];
    double* dst = out.data() + static_cast<std::size_t>(p) * q;
    for (std::size_t r = 0; r < grid.edge; ++r) {
      const double* src = image.data() + (r0 + r) * grid.width + c0;
      std::copy(src, src + grid.edge, dst + r * grid.edge);
    }
  }
}

void average_patches(const PatchGrid& grid, std::span<const double> patches, std::span<double> out) {
  if (single_thread()) {
    serial::average_patches(grid, patches, out);
    return;
  }
  std::vector<std::size_t> row_lo, row_hi, col_lo, col_hi;
  cover_ranges(grid.rows, grid.height, grid.edge, row_lo, row_hi);
  cover_ranges(grid.cols, grid.width, grid.edge, col_lo, col_hi);
  const std::size_t q = grid.patch_size();
  const std::size_t ncols = grid.cols.size();
  const auto height = static_cast<std::int64_t>(grid.height);
#pragma omp parallel for schedule(static)
  for (std::int64_t rr = 0; rr < height; ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    for (std::size_t c = 0; c < grid.width; ++c) {
      double acc = 0.0;
      std::uint32_t seen = 0;
      for (std::size_t pi = row_lo[r]; pi < row_hi[r]; ++pi) {
        const std::size_t dr = r - grid.rows[pi];
        for (std::size_t pj = col_lo[c]; pj < col_hi[c]; ++pj) {
          const std::size_t dc = c - grid.cols[pj];
          detail::running_mean(acc, patches[(pi * ncols + pj) * q + dr * grid.edge + dc], ++seen);
        }
      }
      out[r * grid.width + c] = acc;
    }
  }
}

void transform_patches(std::span<double> patches, std::size_t edge, std::span<const double> basis,
                       bool inverse) {
  const std::size_t q = edge * edge;
  const auto count = static_cast<std::int64_t>(patches.size() / q);
#pragma omp parallel
  {
    std::vector<double> scratch(q);
#pragma omp for schedule(static)
    for (std::int64_t p = 0; p < count; ++p) {
      detail::transform_one(patches.data() + static_cast<std::size_t>(p) * q, scratch.data(), edge,
                            basis.data(), inverse);
    }
  }
}

void assign_nearest(std::span<const double> points, std::size_t dim,
                    std::span<const double> centroids, std::span<std::uint32_t> labels,
                    std::span<double> distances) {
  const auto n = static_cast<std::int64_t>(labels.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    detail::nearest_one(points.data() + k * dim, dim, centroids, labels[k], distances[k]);
  }
}

}  // namespace slope::kernels::parallel
